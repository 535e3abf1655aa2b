# -*- coding: utf-8 -*-
"""
Tikhonov 中心路径

功能：求正则化 Lagrange 函数 L_t 的唯一鞍点 (x_t, y_t)、路径速度及其有界性检查
作用：为 L_t 间隙、能量 Ê 与到中心距离提供移动参考点
创建时间：2026-10-19
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
import scipy.linalg

from ..dynamics.params import DynamicsParams
from ..dynamics.system import check_time, tikhonov_weight
from ..problem.models import ProblemSpec, QuadraticFn, coupling_matrix, dense_hessian

logger = logging.getLogger(__name__)

NEWTON_MAX_ITER = 100
NEWTON_TOLERANCE = 1e-10
FD_RELATIVE_STEP = 1e-4
NORM_SLACK = 1e-8
SPEED_FACTOR = 1.01
SPEED_SLACK = 1e-10


class CenterError(RuntimeError):
    """中心无定义（c = 0）或 Newton 迭代不收敛；iterate 为放弃时残差最小的迭代点"""

    def __init__(
        self, message: str, iterate: Optional[tuple[np.ndarray, np.ndarray]] = None
    ) -> None:
        super().__init__(message)
        self.iterate = iterate


class MissingAnchorError(ValueError):
    """需要鞍点锚点但问题未提供"""


@dataclass(frozen=True, eq=False)
class TikhonovCenter:
    """L_t 的鞍点及其 KKT 残差"""

    t: float
    x_t: np.ndarray
    y_t: np.ndarray
    kkt_residual: float

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.x_t @ self.x_t + self.y_t @ self.y_t))


@dataclass(frozen=True)
class CenterBoundRecord:
    """单个时刻的中心范数与路径速度上界检查"""

    t: float
    center_norm: float
    norm_bound: float
    speed: float
    speed_bound: float

    @property
    def norm_ok(self) -> bool:
        return self.center_norm <= self.norm_bound + NORM_SLACK

    @property
    def speed_ok(self) -> bool:
        return self.speed <= SPEED_FACTOR * self.speed_bound + SPEED_SLACK

    @property
    def passed(self) -> bool:
        return self.norm_ok and self.speed_ok


def _kkt(
    problem: ProblemSpec, eps: float, x: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    rx = problem.f.gradient(x) + eps * x + problem.K.adjoint_apply(y)
    ry = problem.K.apply(x) - problem.g.gradient(y) - eps * y
    return rx, ry


def _residual(problem: ProblemSpec, eps: float, x: np.ndarray, y: np.ndarray) -> float:
    rx, ry = _kkt(problem, eps, x, y)
    return float(np.sqrt(rx @ rx + ry @ ry))


def _solve_quadratic(problem: ProblemSpec, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """
    二次问题的中心：消去 y 后得到对称正定系统

        (Qf + εI + K^T (Qg + εI)^{-1} K) x = -lf + K^T (Qg + εI)^{-1} lg
        y = (Qg + εI)^{-1} (K x - lg)
    """
    f, g = problem.f, problem.g
    assert isinstance(f, QuadraticFn) and isinstance(g, QuadraticFn)
    K = coupling_matrix(problem.K)
    dual = scipy.linalg.cho_factor(g.hessian + eps * np.eye(problem.m), lower=True)
    schur = f.hessian + eps * np.eye(problem.n) + K.T @ scipy.linalg.cho_solve(dual, K)
    rhs = -f.linear + K.T @ scipy.linalg.cho_solve(dual, g.linear)
    x = scipy.linalg.cho_solve(scipy.linalg.cho_factor(schur, lower=True), rhs)
    y = scipy.linalg.cho_solve(dual, K @ x - g.linear)
    return x, y


def _solve_newton(
    problem: ProblemSpec, eps: float, start: Optional[tuple[np.ndarray, np.ndarray]] = None
) -> tuple[np.ndarray, np.ndarray]:
    """一般光滑问题：对单调 KKT 映射做带回溯的阻尼 Newton 迭代"""
    n, m = problem.n, problem.m
    x, y = (np.zeros(n), np.zeros(m)) if start is None else (start[0].copy(), start[1].copy())
    K = coupling_matrix(problem.K)

    def operator(xv: np.ndarray, yv: np.ndarray) -> np.ndarray:
        rx, ry = _kkt(problem, eps, xv, yv)
        return np.concatenate([rx, -ry])

    F = operator(x, y)
    res = float(np.linalg.norm(F))
    for iteration in range(NEWTON_MAX_ITER):
        if res <= NEWTON_TOLERANCE * (1.0 + np.sqrt(x @ x + y @ y)):
            logger.debug("中心 Newton 迭代 %d 次收敛, 残差 %.3e", iteration, res)
            return x, y
        jac = np.block([
            [dense_hessian(problem.f, x) + eps * np.eye(n), K.T],
            [-K, dense_hessian(problem.g, y) + eps * np.eye(m)],
        ])
        step = np.linalg.solve(jac, -F)
        size = 1.0
        for _ in range(30):
            x_new, y_new = x + size * step[:n], y + size * step[n:]
            F_new = operator(x_new, y_new)
            res_new = float(np.linalg.norm(F_new))
            if res_new < (1.0 - 1e-4 * size) * res:
                break
            size *= 0.5
        else:
            raise CenterError(
                f"中心 Newton 第 {iteration} 步线搜索失败, 残差停在 {res:.3e}",
                iterate=(x, y),
            )
        x, y, F, res = x_new, y_new, F_new, res_new
    if res <= NEWTON_TOLERANCE * (1.0 + np.sqrt(x @ x + y @ y)):
        return x, y
    raise CenterError(
        f"中心 Newton 迭代 {NEWTON_MAX_ITER} 次未收敛, 最后残差 {res:.3e}", iterate=(x, y)
    )


def _center_unchecked(problem: ProblemSpec, params: DynamicsParams, t: float) -> TikhonovCenter:
    if params.c == 0:
        raise CenterError("center undefined: c = 0 时 L_t 不是强凸-强凹的")
    eps = tikhonov_weight(params, t)
    if problem.is_quadratic:
        x, y = _solve_quadratic(problem, eps)
    else:
        x, y = _solve_newton(problem, eps, problem.min_norm_saddle)
    return TikhonovCenter(t=float(t), x_t=x, y_t=y, kkt_residual=_residual(problem, eps, x, y))


def tikhonov_center(problem: ProblemSpec, params: DynamicsParams, t: float) -> TikhonovCenter:
    """
    求 L_t 的鞍点 (x_t, y_t)

    Raises:
        DomainError: t < t0
        CenterError: c = 0 或 Newton 不收敛
    """
    check_time(params, t)
    return _center_unchecked(problem, params, t)


def tikhonov_center_velocity(
    problem: ProblemSpec, params: DynamicsParams, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """中心路径速度 (ẋ_t, ẏ_t)，步长 h = 1e-4·t 的中心差分"""
    check_time(params, t)
    h = FD_RELATIVE_STEP * t
    ahead = _center_unchecked(problem, params, t + h)
    behind = _center_unchecked(problem, params, t - h)
    return (ahead.x_t - behind.x_t) / (2 * h), (ahead.y_t - behind.y_t) / (2 * h)


def check_center_bounds(
    problem: ProblemSpec, params: DynamicsParams, times: Iterable[float]
) -> list[CenterBoundRecord]:
    """
    检查中心路径的两条上界

    ‖(x_t, y_t)‖ <= ‖(x̄*, ȳ*)‖，‖(ẋ_t, ẏ_t)‖ <= (p/t)‖(x̄*, ȳ*)‖
    """
    anchor = problem.min_norm_saddle
    if anchor is None:
        raise MissingAnchorError(f"问题 {problem.name} 未提供最小范数鞍点")
    anchor_norm = float(np.sqrt(anchor[0] @ anchor[0] + anchor[1] @ anchor[1]))
    records = []
    for t in times:
        center = tikhonov_center(problem, params, t)
        vx, vy = tikhonov_center_velocity(problem, params, t)
        records.append(
            CenterBoundRecord(
                t=float(t),
                center_norm=center.norm,
                norm_bound=anchor_norm,
                speed=float(np.sqrt(vx @ vx + vy @ vy)),
                speed_bound=params.p / t * anchor_norm,
            )
        )
    failed = [r.t for r in records if not r.passed]
    if failed:
        logger.warning("中心路径上界在 %d 个时刻不成立: %s", len(failed), failed[:5])
    return records
