# -*- coding: utf-8 -*-
"""
轨迹观测量

功能：原始-对偶间隙、L_t 间隙、两种 Lyapunov 能量、Δ(t)、残差与距离
作用：把积分得到的相空间样本转换为逐行诊断记录
创建时间：2026-10-19
"""

from __future__ import annotations

import logging
from dataclasses import astuple, dataclass, field
from typing import Optional

import numpy as np

from ..dynamics.params import DynamicsParams, State
from ..dynamics.system import (
    aug_lagrangian,
    extrapolated_gradients,
    theta,
    theta_numerator,
    tikhonov_weight,
)
from ..integrator.dopri import IntegrationResult
from ..problem.models import ProblemSpec
from .center import MissingAnchorError, TikhonovCenter, tikhonov_center

logger = logging.getLogger(__name__)

Anchor = tuple[np.ndarray, np.ndarray]

CSV_COLUMNS = (
    "t",
    "gap",
    "lt_gap",
    "dist_min_norm",
    "dist_center",
    "energy_E",
    "energy_Ehat",
    "delta",
    "theta",
    "speed",
    "residual_x",
    "residual_y",
)


def _resolve_anchor(problem: ProblemSpec, anchor: Optional[Anchor]) -> Anchor:
    anchor = anchor if anchor is not None else problem.anchor
    if anchor is None:
        raise MissingAnchorError(f"问题 {problem.name} 没有鞍点锚点 (x*, y*)")
    return anchor


def _pair_norm(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(a @ a + b @ b))


def primal_dual_gap(problem: ProblemSpec, state: State, anchor: Optional[Anchor] = None) -> float:
    """L(x(t), y*) - L(x*, y(t))"""
    x_star, y_star = _resolve_anchor(problem, anchor)
    return problem.lagrangian(state.x, y_star) - problem.lagrangian(x_star, state.y)


def lt_gap(
    problem: ProblemSpec,
    params: DynamicsParams,
    state: State,
    center: Optional[TikhonovCenter] = None,
) -> float:
    """L_t(x(t), y_t) - L_t(x_t, y(t))"""
    center = center or tikhonov_center(problem, params, state.t)
    t = state.t
    return aug_lagrangian(problem, params, t, state.x, center.y_t) - aug_lagrangian(
        problem, params, t, center.x_t, state.y
    )


def _anchored_terms(
    problem: ProblemSpec,
    params: DynamicsParams,
    state: State,
    x_ref: np.ndarray,
    y_ref: np.ndarray,
) -> float:
    """能量中与参考点相关的两项 E₂ + E₃"""
    t, alpha, q, gamma = state.t, params.alpha, params.q, params.gamma
    gx, gy = extrapolated_gradients(problem, params, state)
    tq = t**q
    weight = 0.5 * (alpha - 1) * (1 - q * t ** (q - 1))
    dx, dy = state.x - x_ref, state.y - y_ref
    mx = (alpha - 1) * dx + tq * (state.vx + gamma * gx)
    my = (alpha - 1) * dy + tq * (state.vy - gamma * gy)
    return 0.5 * float(mx @ mx + my @ my) + weight * float(dx @ dx + dy @ dy)


def energy_E(
    problem: ProblemSpec, params: DynamicsParams, state: State, anchor: Optional[Anchor] = None
) -> float:
    """以固定鞍点 (x*, y*) 为参考的能量 E = E₁ + E₂ + E₃"""
    x_star, y_star = _resolve_anchor(problem, anchor)
    t = state.t
    eps = tikhonov_weight(params, t)
    gap = primal_dual_gap(problem, state, (x_star, y_star))
    penalty = 0.5 * eps * float(state.x @ state.x + state.y @ state.y)
    first = theta_numerator(params, t) * (gap + penalty)
    return first + _anchored_terms(problem, params, state, x_star, y_star)


def energy_Ehat(
    problem: ProblemSpec,
    params: DynamicsParams,
    state: State,
    center: Optional[TikhonovCenter] = None,
) -> float:
    """以 Tikhonov 中心 (x_t, y_t) 为参考的能量 Ê = Ê₁ + Ê₂ + Ê₃"""
    center = center or tikhonov_center(problem, params, state.t)
    first = theta_numerator(params, state.t) * lt_gap(problem, params, state, center)
    return first + _anchored_terms(problem, params, state, center.x_t, center.y_t)


def delta_diag(problem: ProblemSpec, params: DynamicsParams, state: State) -> float:
    """Δ(t) = ‖∇ₓL_t(x, y+θẏ)‖² + ‖∇_yL_t(x+θẋ, y)‖²"""
    gx, gy = extrapolated_gradients(problem, params, state)
    return float(gx @ gx + gy @ gy)


def residuals(problem: ProblemSpec, params: DynamicsParams, state: State) -> tuple[float, float]:
    """(‖ẋ + γ∇ₓL_t(x, y+θẏ)‖, ‖ẏ - γ∇_yL_t(x+θẋ, y)‖)"""
    gx, gy = extrapolated_gradients(problem, params, state)
    gamma = params.gamma
    return (
        float(np.linalg.norm(state.vx + gamma * gx)),
        float(np.linalg.norm(state.vy - gamma * gy)),
    )


@dataclass(frozen=True)
class DiagnosticsRow:
    """单个采样时刻的诊断量，None 表示不适用（输出为 NA）"""

    t: float
    gap: Optional[float]
    lt_gap: Optional[float]
    dist_min_norm: Optional[float]
    dist_center: Optional[float]
    energy_E: Optional[float]
    energy_Ehat: Optional[float]
    delta: float
    theta: float
    speed: float
    residual_x: float
    residual_y: float

    def values(self) -> tuple[Optional[float], ...]:
        return astuple(self)


def diagnostics_row(
    problem: ProblemSpec, params: DynamicsParams, state: State
) -> DiagnosticsRow:
    """计算一行诊断量；c = 0 时中心相关列为 None，无锚点时间隙与能量为 None"""
    t = state.t
    anchor = problem.anchor
    gap = energy = dist_min = None
    if anchor is not None:
        gap = primal_dual_gap(problem, state, anchor)
        energy = energy_E(problem, params, state, anchor)
    if problem.min_norm_saddle is not None:
        x_bar, y_bar = problem.min_norm_saddle
        dist_min = _pair_norm(state.x - x_bar, state.y - y_bar)

    gap_t = energy_hat = dist_c = None
    if params.c > 0:
        center = tikhonov_center(problem, params, t)
        gap_t = lt_gap(problem, params, state, center)
        energy_hat = energy_Ehat(problem, params, state, center)
        dist_c = _pair_norm(state.x - center.x_t, state.y - center.y_t)

    res_x, res_y = residuals(problem, params, state)
    return DiagnosticsRow(
        t=t,
        gap=gap,
        lt_gap=gap_t,
        dist_min_norm=dist_min,
        dist_center=dist_c,
        energy_E=energy,
        energy_Ehat=energy_hat,
        delta=delta_diag(problem, params, state),
        theta=theta(params, t),
        speed=_pair_norm(state.vx, state.vy),
        residual_x=res_x,
        residual_y=res_y,
    )


@dataclass
class Trajectory:
    """采样轨迹及其逐行诊断"""

    problem: ProblemSpec
    params: DynamicsParams
    states: list[State] = field(default_factory=list)
    rows: list[DiagnosticsRow] = field(default_factory=list)
    objective_error: Optional[np.ndarray] = None
    complete: bool = True
    message: str = ""

    def __len__(self) -> int:
        return len(self.states)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def column(self, name: str) -> np.ndarray:
        """按列名取诊断序列，不适用的项为 NaN"""
        if name not in CSV_COLUMNS:
            raise KeyError(f"未知诊断列: {name}")
        values = [getattr(row, name) for row in self.rows]
        return np.array([np.nan if v is None else v for v in values], dtype=float)

    def has_column(self, name: str) -> bool:
        return bool(self.rows) and getattr(self.rows[0], name) is not None


def analyze(
    problem: ProblemSpec, params: DynamicsParams, result: IntegrationResult
) -> Trajectory:
    """把积分结果转换为带诊断的轨迹"""
    n, m = problem.n, problem.m
    states = [State.from_phase(t, z, n, m) for t, z in result]
    rows = [diagnostics_row(problem, params, s) for s in states]
    objective = None
    if problem.primal_objective is not None and problem.primal_optimum is not None:
        objective = np.array(
            [problem.primal_objective(s.x) - problem.primal_optimum for s in states]
        )
    logger.debug("诊断完成: %d 个样本", len(rows))
    return Trajectory(
        problem=problem,
        params=params,
        states=states,
        rows=rows,
        objective_error=objective,
        complete=result.complete,
        message=result.message,
    )
