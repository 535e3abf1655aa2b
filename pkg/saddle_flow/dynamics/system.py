# -*- coding: utf-8 -*-
"""
原始-对偶动力系统右端项

功能：外推参数 θ(t) 及其导数、增广 Lagrange 函数 L_t 及偏梯度、加速度块系统求解
作用：把带 Hessian 阻尼的二阶系统化为显式一阶相空间 ODE
创建时间：2026-10-19

展开 γ·d/dt ∇L_t(·) 后加速度满足块系统
    [ I        γθK* ] [ẍ]   [F_x]
    [ -γθK     I    ] [ÿ] = [F_y]
系数矩阵为单位阵加反对称阵，恒可逆；用 Schur 补
    (I + γ²θ² K*K) ẍ = F_x - γθ K* F_y,   ÿ = F_y + γθ K ẍ
求解。
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Optional

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from ..problem.models import ProblemSpec, coupling_gram, coupling_matrix
from .params import DynamicsParams, State

logger = logging.getLogger(__name__)

# 不超过该维数时稠密 Cholesky，否则共轭梯度
DENSE_SCHUR_LIMIT = 512
CG_TOLERANCE = 1e-12


class DomainError(ValueError):
    """时间 t 不在 [t0, ∞) 内"""


class DynamicsError(RuntimeError):
    """右端项计算失败（非有限值或 Schur 系统求解失败）"""


def check_time(params: DynamicsParams, t: float) -> None:
    """t 必须位于 [t0, ∞)"""
    if not t >= params.t0:
        raise DomainError(f"t={t} 小于初始时刻 t0={params.t0}")


def theta_numerator(params: DynamicsParams, t: float) -> float:
    """N(t) = t^(2q+s) - 2γq t^(2q-1) + γ t^q，也是能量首项的时间权重"""
    q, s, gamma = params.q, params.s, params.gamma
    return t ** (2 * q + s) - 2 * gamma * q * t ** (2 * q - 1) + gamma * t**q


def _theta_parts(params: DynamicsParams, t: float) -> tuple[float, float, float, float]:
    alpha, q, s, gamma = params.alpha, params.q, params.s, params.gamma
    num = theta_numerator(params, t)
    den = (alpha - 1) * (t ** (q + s) - gamma * q * t ** (q - 1))
    d_num = (
        (2 * q + s) * t ** (2 * q + s - 1)
        - 2 * gamma * q * (2 * q - 1) * t ** (2 * q - 2)
        + gamma * q * t ** (q - 1)
    )
    d_den = (alpha - 1) * ((q + s) * t ** (q + s - 1) - gamma * q * (q - 1) * t ** (q - 2))
    return num, den, d_num, d_den


def theta(params: DynamicsParams, t: float) -> float:
    """外推参数 θ(t) = N(t) / D(t)"""
    check_time(params, t)
    num, den, _, _ = _theta_parts(params, t)
    return num / den


def theta_dot(params: DynamicsParams, t: float) -> float:
    """θ'(t)，商法则解析求导"""
    check_time(params, t)
    num, den, d_num, d_den = _theta_parts(params, t)
    return (d_num * den - num * d_den) / (den * den)


def tikhonov_weight(params: DynamicsParams, t: float) -> float:
    """正则化系数 ε(t) = c / t^p"""
    return params.c / t**params.p


def aug_lagrangian(
    problem: ProblemSpec, params: DynamicsParams, t: float, x: np.ndarray, y: np.ndarray
) -> float:
    """L_t(x, y) = L(x, y) + c/(2t^p) (‖x‖² - ‖y‖²)"""
    check_time(params, t)
    eps = tikhonov_weight(params, t)
    return problem.lagrangian(x, y) + 0.5 * eps * (float(x @ x) - float(y @ y))


def grad_x_Lt(
    problem: ProblemSpec, params: DynamicsParams, t: float, x: np.ndarray, y_tilde: np.ndarray
) -> np.ndarray:
    """∇ₓL_t(x, ỹ) = ∇f(x) + (c/t^p) x + K* ỹ"""
    check_time(params, t)
    problem.check_dims(x, y_tilde)
    return problem.f.gradient(x) + tikhonov_weight(params, t) * x + problem.K.adjoint_apply(y_tilde)


def grad_y_Lt(
    problem: ProblemSpec, params: DynamicsParams, t: float, x_tilde: np.ndarray, y: np.ndarray
) -> np.ndarray:
    """∇_yL_t(x̃, y) = K x̃ - ∇g(y) - (c/t^p) y"""
    check_time(params, t)
    problem.check_dims(x_tilde, y)
    return problem.K.apply(x_tilde) - problem.g.gradient(y) - tikhonov_weight(params, t) * y


def theta_pair(params: DynamicsParams, t: float) -> tuple[float, float]:
    """(θ(t), θ'(t))，共用一次 N、D 及其导数的计算"""
    check_time(params, t)
    num, den, d_num, d_den = _theta_parts(params, t)
    return num / den, (d_num * den - num * d_den) / (den * den)


def _extrapolated(
    problem: ProblemSpec, params: DynamicsParams, state: State, th: float
) -> tuple[np.ndarray, np.ndarray]:
    t, x, y = state.t, state.x, state.y
    eps = tikhonov_weight(params, t)
    gx = problem.f.gradient(x) + eps * x + problem.K.adjoint_apply(y + th * state.vy)
    gy = problem.K.apply(x + th * state.vx) - problem.g.gradient(y) - eps * y
    return gx, gy


def extrapolated_gradients(
    problem: ProblemSpec, params: DynamicsParams, state: State
) -> tuple[np.ndarray, np.ndarray]:
    """外推点处的梯度 (∇ₓL_t(x, y+θẏ), ∇_yL_t(x+θẋ, y))"""
    problem.check_dims(state.x, state.y)
    return _extrapolated(problem, params, state, theta(params, state.t))


def _forces(
    problem: ProblemSpec, params: DynamicsParams, state: State, th: float, th_dot: float
) -> tuple[np.ndarray, np.ndarray]:
    t = state.t
    alpha, q, p, c, gamma = params.alpha, params.q, params.p, params.c, params.gamma
    eps = tikhonov_weight(params, t)
    eps_dot = c * p / t ** (p + 1)
    friction = alpha / t**q
    scale = t**params.s
    gx, gy = _extrapolated(problem, params, state, th)
    x, y, vx, vy = state.x, state.y, state.vx, state.vy

    fx = -friction * vx - scale * gx
    fy = -friction * vy + scale * gy
    if gamma != 0.0:
        fx -= gamma * (
            problem.f.hessian_vec(x, vx)
            + eps * vx
            - eps_dot * x
            + (1.0 + th_dot) * problem.K.adjoint_apply(vy)
        )
        fy += gamma * (
            (1.0 + th_dot) * problem.K.apply(vx)
            - problem.g.hessian_vec(y, vy)
            - eps * vy
            + eps_dot * y
        )
    return fx, fy


def forces(
    problem: ProblemSpec, params: DynamicsParams, state: State
) -> tuple[np.ndarray, np.ndarray]:
    """块系统右端 (F_x, F_y)"""
    problem.check_dims(state.x, state.y)
    th, th_dot = theta_pair(params, state.t)
    return _forces(problem, params, state, th, th_dot)


def mass_matrix(problem: ProblemSpec, params: DynamicsParams, t: float) -> np.ndarray:
    """稠密块矩阵 [[I, γθK*], [-γθK, I]]，仅供小规模校验"""
    n, m = problem.n, problem.m
    coef = params.gamma * theta(params, t)
    K = coupling_matrix(problem.K)
    return np.block([[np.eye(n), coef * K.T], [-coef * K, np.eye(m)]])


def _solve_schur(
    problem: ProblemSpec,
    coef: float,
    rhs: np.ndarray,
    spectrum: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> np.ndarray:
    """
    解 (I + coef² K*K) z = rhs

    spectrum 为 K*K 的特征分解 (λ, V)，给出时直接 z = V diag(1/(1+coef²λ)) Vᵀ rhs。
    """
    n = problem.n
    if spectrum is not None:
        eigvals, eigvecs = spectrum
        return eigvecs @ ((eigvecs.T @ rhs) / (1.0 + coef * coef * eigvals))
    if n <= DENSE_SCHUR_LIMIT:
        schur = coef * coef * coupling_gram(problem.K)
        schur[np.diag_indices(n)] += 1.0
        try:
            factor = scipy.linalg.cho_factor(
                schur, lower=True, overwrite_a=True, check_finite=True
            )
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise DynamicsError(
                f"Schur 系统 Cholesky 分解失败 (条件数估计 {_schur_condition(problem, coef):.3e})"
            ) from exc
        return scipy.linalg.cho_solve(factor, rhs)

    K = problem.K

    def matvec(v: np.ndarray) -> np.ndarray:
        return v + coef * coef * K.adjoint_apply(K.apply(v))

    operator = scipy.sparse.linalg.LinearOperator((n, n), matvec=matvec, dtype=float)
    solution, info = scipy.sparse.linalg.cg(operator, rhs, rtol=CG_TOLERANCE, atol=0.0)
    if info != 0:
        raise DynamicsError(
            f"Schur 系统共轭梯度未收敛 (info={info}, 条件数估计 {_schur_condition(problem, coef):.3e})"
        )
    return solution


def _schur_condition(problem: ProblemSpec, coef: float) -> float:
    norm = problem.K.op_norm_estimate
    if not (math.isfinite(coef) and math.isfinite(norm)):
        return float("inf")
    return 1.0 + (coef * norm) ** 2


def _accelerations(
    problem: ProblemSpec,
    params: DynamicsParams,
    state: State,
    th: float,
    th_dot: float,
    spectrum: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    fx, fy = _forces(problem, params, state, th, th_dot)
    coef = params.gamma * th
    if coef == 0.0 or problem.K.op_norm_estimate == 0.0:
        ax, ay = fx, fy
    else:
        ax = _solve_schur(problem, coef, fx - coef * problem.K.adjoint_apply(fy), spectrum)
        ay = fy + coef * problem.K.apply(ax)
    if not (np.all(np.isfinite(ax)) and np.all(np.isfinite(ay))):
        raise DynamicsError(f"t={state.t} 处加速度出现非有限值")
    return ax, ay


def accelerations(
    problem: ProblemSpec, params: DynamicsParams, state: State
) -> tuple[np.ndarray, np.ndarray]:
    """
    求解加速度 (ẍ, ÿ)

    γ = 0 或 K = 0 时块系统退化为单位阵，直接返回 (F_x, F_y)。
    """
    problem.check_dims(state.x, state.y)
    th, th_dot = theta_pair(params, state.t)
    return _accelerations(problem, params, state, th, th_dot)


def phase_rhs(
    problem: ProblemSpec, params: DynamicsParams, t: float, phase: np.ndarray
) -> np.ndarray:
    """相空间右端项 [ẋ | ẏ | ẍ | ÿ]"""
    return _phase_rhs(problem, params, t, phase)


def _phase_rhs(
    problem: ProblemSpec,
    params: DynamicsParams,
    t: float,
    phase: np.ndarray,
    spectrum: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> np.ndarray:
    n, m = problem.n, problem.m
    phase = np.asarray(phase, dtype=float)
    if phase.shape != (2 * (n + m),):
        raise ValueError(f"相空间向量长度应为 {2 * (n + m)}, 实际 {phase.shape}")
    if not np.all(np.isfinite(phase)):
        raise DynamicsError(f"t={t} 处相空间向量含非有限值")
    th, th_dot = theta_pair(params, t)
    state = State.from_phase(t, phase, n, m, copy=False)
    ax, ay = _accelerations(problem, params, state, th, th_dot, spectrum)
    out = np.empty(phase.size)
    out[:n + m] = phase[n + m:]
    out[n + m:2 * n + m] = ax
    out[2 * n + m:] = ay
    return out


def make_rhs(
    problem: ProblemSpec, params: DynamicsParams
) -> Callable[[float, np.ndarray], np.ndarray]:
    """
    绑定问题与参数，得到积分器使用的 rhs(t, z)

    K*K 的特征分解在构造时计算一次；每次调用只计算一次 (θ, θ')，
    相空间向量按视图切分，不复制。
    """
    spectrum = None
    if params.gamma != 0.0 and problem.n <= DENSE_SCHUR_LIMIT and problem.K.op_norm_estimate != 0.0:
        eigvals, eigvecs = scipy.linalg.eigh(coupling_gram(problem.K))
        spectrum = (np.clip(eigvals, 0.0, None), eigvecs)

    def rhs(t: float, phase: np.ndarray) -> np.ndarray:
        return _phase_rhs(problem, params, t, phase, spectrum)

    return rhs
