# -*- coding: utf-8 -*-
"""
内置鞍点问题

功能：构造秩一耦合二次问题、ℓ2 正则化最小二乘问题、自定义二次问题与随机实例
作用：为动力系统实验提供带已知锚点的标准问题
创建时间：2026-10-19
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .models import DimensionError, MatrixCoupling, ProblemSpec, QuadraticFn


@dataclass(frozen=True, eq=False)
class InitialData:
    """初始条件 x(t0), y(t0), ẋ(t0), ẏ(t0)"""

    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray


def standard_normal_generator(seed: int) -> np.random.Generator:
    """
    可复现的标准正态随机数发生器

    使用 numpy 的 Philox（计数器型）比特发生器，
    正态变换由 Generator.standard_normal 完成。
    相同种子在任意平台上产生相同序列。
    """
    if seed < 0:
        raise ValueError(f"种子必须为非负整数, 实际 {seed}")
    return np.random.Generator(np.random.Philox(seed))


def make_example_51(
    m_coef: float, n_coef: float, j_coef: float, k_coef: float
) -> ProblemSpec:
    """
    秩一耦合二次问题

    (m x1 + n x2)^2 + (m x1 + n x2)(j y1 + k y2) - (j y1 + k y2)^2

    f(x) = (v^T x)^2, g(y) = (u^T y)^2, K = u v^T，其中 v = (m, n), u = (j, k)。
    鞍点集为 {v^T x = 0, u^T y = 0}，最小范数解为原点。
    """
    v = np.array([m_coef, n_coef], dtype=float)
    u = np.array([j_coef, k_coef], dtype=float)
    origin = (np.zeros(2), np.zeros(2))
    return ProblemSpec(
        f=QuadraticFn(2.0 * np.outer(v, v)),
        g=QuadraticFn(2.0 * np.outer(u, u)),
        K=MatrixCoupling(np.outer(u, v)),
        saddle_point=origin,
        min_norm_saddle=origin,
        name=f"example51({m_coef:g},{n_coef:g},{j_coef:g},{k_coef:g})",
    )


def make_example_52(K_matrix: np.ndarray, b: np.ndarray, eta: float) -> ProblemSpec:
    """
    ℓ2 正则化最小二乘的鞍点形式

    min_x Φ(x) = 1/2 ‖Kx - b‖^2 + η‖x‖^2
    <=> min_x max_y η‖x‖^2 + <Kx, y> - (1/2 ‖y‖^2 + <b, y>)

    鞍点由法方程 (K^T K + 2ηI) x* = K^T b, y* = K x* - b 给出；
    f, g 均强凸，鞍点唯一，同时也是最小范数解。
    """
    if eta <= 0:
        raise ValueError(f"eta 必须为正数, 实际 {eta}")
    K_matrix = np.atleast_2d(np.asarray(K_matrix, dtype=float))
    b = np.asarray(b, dtype=float)
    m, n = K_matrix.shape
    if b.shape != (m,):
        raise DimensionError(f"b 长度 {b.shape} 与 K 行数 {m} 不匹配")

    normal = K_matrix.T @ K_matrix + 2.0 * eta * np.eye(n)
    x_star = np.linalg.solve(normal, K_matrix.T @ b)
    y_star = K_matrix @ x_star - b

    def objective(x: np.ndarray) -> float:
        r = K_matrix @ x - b
        return float(0.5 * r @ r + eta * x @ x)

    return ProblemSpec(
        f=QuadraticFn(2.0 * eta * np.eye(n)),
        g=QuadraticFn(np.eye(m), linear=b),
        K=MatrixCoupling(K_matrix),
        saddle_point=(x_star, y_star),
        min_norm_saddle=(x_star, y_star),
        name=f"example52(m={m},n={n},eta={eta:g})",
        primal_objective=objective,
        primal_optimum=objective(x_star),
    )


def make_random_instance(
    m: int, n: int, seed: int, eta: float = 1.0
) -> tuple[ProblemSpec, InitialData]:
    """
    随机 ℓ2 正则化最小二乘实例

    K、b 与全部初始条件的元素独立取自标准正态分布。
    抽取顺序固定为 K (按行), b, x0, y0, ẋ0, ẏ0。
    """
    if m < 1 or n < 1:
        raise ValueError(f"维数必须为正整数, 实际 m={m}, n={n}")
    rng = standard_normal_generator(seed)
    K_matrix = rng.standard_normal((m, n))
    b = rng.standard_normal(m)
    initial = InitialData(
        x=rng.standard_normal(n),
        y=rng.standard_normal(m),
        vx=rng.standard_normal(n),
        vy=rng.standard_normal(m),
    )
    problem = make_example_52(K_matrix, b, eta)
    object.__setattr__(problem, "name", f"random(m={m},n={n},seed={seed},eta={eta:g})")
    return problem, initial


def make_quadratic(
    f_matrix: np.ndarray,
    g_matrix: np.ndarray,
    coupling: np.ndarray,
    f_linear: Optional[Sequence[float]] = None,
    g_linear: Optional[Sequence[float]] = None,
) -> ProblemSpec:
    """
    自定义二次鞍点问题

    最优性条件是线性方程组
        [Qf  K^T] [x]   [-lf]
        [K  -Qg ] [y] = [ lg]
    其解集即鞍点集；最小范数鞍点取该（可能奇异）方程组的伪逆解。
    """
    f = QuadraticFn(np.asarray(f_matrix, float), f_linear)
    g = QuadraticFn(np.asarray(g_matrix, float), g_linear)
    K = MatrixCoupling(np.asarray(coupling, float))
    n, m = f.dim, g.dim
    if K.matrix.shape != (m, n):
        raise DimensionError(f"耦合矩阵形状 {K.matrix.shape} 应为 ({m}, {n})")

    system = np.block([[f.hessian, K.matrix.T], [K.matrix, -g.hessian]])
    rhs = np.concatenate([-f.linear, g.linear])
    z = np.linalg.pinv(system) @ rhs
    if np.linalg.norm(system @ z - rhs) > 1e-8 * (1.0 + np.linalg.norm(rhs)):
        raise ValueError("鞍点集为空: 最优性方程组不相容")
    anchor = (z[:n], z[n:])
    return ProblemSpec(f=f, g=g, K=K, saddle_point=anchor, min_norm_saddle=anchor, name="quadratic")
