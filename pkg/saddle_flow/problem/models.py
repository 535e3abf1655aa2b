# -*- coding: utf-8 -*-
"""
鞍点问题数据模型

功能：定义双线性凸-凹鞍点问题 min_x max_y f(x) + <Kx, y> - g(y) 的抽象
作用：光滑凸函数、线性耦合算子、问题规格（含已知鞍点锚点）
创建时间：2026-10-19
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Protocol, runtime_checkable

import numpy as np

# 锚点残差容差
ANCHOR_TOLERANCE = 1e-8


class DimensionError(ValueError):
    """向量维数与问题不匹配"""


@runtime_checkable
class SmoothConvexFn(Protocol):
    """二阶连续可微凸函数：值、梯度、Hessian-向量积"""

    dim: int

    def value(self, v: np.ndarray) -> float: ...

    def gradient(self, v: np.ndarray) -> np.ndarray: ...

    def hessian_vec(self, v: np.ndarray, w: np.ndarray) -> np.ndarray: ...


@runtime_checkable
class LinearCoupling(Protocol):
    """线性算子 K: R^n -> R^m 及其伴随"""

    rows: int
    cols: int
    op_norm_estimate: float

    def apply(self, x: np.ndarray) -> np.ndarray: ...

    def adjoint_apply(self, y: np.ndarray) -> np.ndarray: ...


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class QuadraticFn:
    """
    二次函数 h(v) = 1/2 v^T Q v + <l, v> + const

    Q 必须对称半正定（保证凸性）。
    """

    hessian: np.ndarray
    linear: Optional[np.ndarray] = None
    constant: float = 0.0

    def __post_init__(self) -> None:
        q = np.atleast_2d(np.asarray(self.hessian, dtype=float))
        if q.shape[0] != q.shape[1]:
            raise DimensionError(f"Hessian 必须是方阵, 实际形状 {q.shape}")
        if not np.allclose(q, q.T, atol=1e-12):
            raise ValueError("Hessian 必须对称")
        if q.size and np.linalg.eigvalsh(q).min() < -1e-10 * max(1.0, np.abs(q).max()):
            raise ValueError("Hessian 不是半正定矩阵, 函数非凸")
        lin = np.zeros(q.shape[0]) if self.linear is None else np.asarray(self.linear, float)
        if lin.shape != (q.shape[0],):
            raise DimensionError(f"线性项长度 {lin.shape} 与 Hessian {q.shape} 不匹配")
        object.__setattr__(self, "hessian", _frozen(q))
        object.__setattr__(self, "linear", _frozen(lin))

    @property
    def dim(self) -> int:
        return self.hessian.shape[0]

    def value(self, v: np.ndarray) -> float:
        return float(0.5 * v @ (self.hessian @ v) + self.linear @ v + self.constant)

    def gradient(self, v: np.ndarray) -> np.ndarray:
        return self.hessian @ v + self.linear

    def hessian_vec(self, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        return self.hessian @ w


@dataclass(frozen=True, eq=False)
class MatrixCoupling:
    """以稠密矩阵表示的耦合算子 K (m x n)"""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _frozen(np.atleast_2d(self.matrix)))

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @cached_property
    def op_norm_estimate(self) -> float:
        if self.matrix.size == 0:
            return 0.0
        return float(np.linalg.norm(self.matrix, 2))

    @cached_property
    def gram(self) -> np.ndarray:
        """K^T K，Schur 补系统的常数部分"""
        return _frozen(self.matrix.T @ self.matrix)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def adjoint_apply(self, y: np.ndarray) -> np.ndarray:
        return self.matrix.T @ y


def dense_hessian(fn: SmoothConvexFn, v: np.ndarray) -> np.ndarray:
    """在点 v 处组装稠密 Hessian（二次函数直接返回矩阵）"""
    if isinstance(fn, QuadraticFn):
        return np.array(fn.hessian)
    eye = np.eye(fn.dim)
    cols = [fn.hessian_vec(v, eye[:, i]) for i in range(fn.dim)]
    return np.column_stack(cols) if cols else np.zeros((0, 0))


def coupling_matrix(K: LinearCoupling) -> np.ndarray:
    """取耦合算子的稠密矩阵"""
    if isinstance(K, MatrixCoupling):
        return np.array(K.matrix)
    eye = np.eye(K.cols)
    cols = [K.apply(eye[:, i]) for i in range(K.cols)]
    return np.column_stack(cols) if cols else np.zeros((K.rows, 0))


def coupling_gram(K: LinearCoupling) -> np.ndarray:
    """K^T K"""
    if isinstance(K, MatrixCoupling):
        return K.gram
    mat = coupling_matrix(K)
    return mat.T @ mat


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """
    双线性鞍点问题

    L(x, y) = f(x) + <Kx, y> - g(y)

    saddle_point 与 min_norm_saddle 为可选的已知锚点 (x*, y*) 与 (x̄*, ȳ*)。
    primal_objective / primal_optimum 用于正则化最小二乘一类问题的目标误差。
    """

    f: SmoothConvexFn
    g: SmoothConvexFn
    K: LinearCoupling
    saddle_point: Optional[tuple[np.ndarray, np.ndarray]] = None
    min_norm_saddle: Optional[tuple[np.ndarray, np.ndarray]] = None
    name: str = "custom"
    primal_objective: Optional[Callable[[np.ndarray], float]] = field(default=None, compare=False)
    primal_optimum: Optional[float] = None

    def __post_init__(self) -> None:
        if self.K.cols != self.f.dim or self.K.rows != self.g.dim:
            raise DimensionError(
                f"耦合算子形状 ({self.K.rows}, {self.K.cols}) 与 "
                f"f({self.f.dim}) / g({self.g.dim}) 不匹配"
            )
        for label in ("saddle_point", "min_norm_saddle"):
            anchor = getattr(self, label)
            if anchor is None:
                continue
            x_star, y_star = (_frozen(a) for a in anchor)
            object.__setattr__(self, label, (x_star, y_star))
            residual = self.saddle_residual(x_star, y_star)
            if residual > ANCHOR_TOLERANCE:
                raise ValueError(f"{label} 不满足最优性条件, 残差 {residual:.3e}")

    @property
    def n(self) -> int:
        return self.f.dim

    @property
    def m(self) -> int:
        return self.g.dim

    @property
    def is_quadratic(self) -> bool:
        return isinstance(self.f, QuadraticFn) and isinstance(self.g, QuadraticFn)

    @property
    def anchor(self) -> Optional[tuple[np.ndarray, np.ndarray]]:
        """原始-对偶间隙使用的鞍点锚点（优先 saddle_point）"""
        return self.saddle_point if self.saddle_point is not None else self.min_norm_saddle

    def check_dims(self, x: np.ndarray, y: np.ndarray) -> None:
        if np.shape(x) != (self.n,) or np.shape(y) != (self.m,):
            raise DimensionError(
                f"期望 x∈R^{self.n}, y∈R^{self.m}, 实际 {np.shape(x)} / {np.shape(y)}"
            )

    def lagrangian(self, x: np.ndarray, y: np.ndarray) -> float:
        self.check_dims(x, y)
        return self.f.value(x) + float(self.K.apply(x) @ y) - self.g.value(y)

    def saddle_residual(self, x: np.ndarray, y: np.ndarray) -> float:
        """c = 0 最优性条件残差 max(‖∇f(x)+K*y‖, ‖Kx-∇g(y)‖)"""
        self.check_dims(x, y)
        rx = self.f.gradient(x) + self.K.adjoint_apply(y)
        ry = self.K.apply(x) - self.g.gradient(y)
        return float(max(np.linalg.norm(rx), np.linalg.norm(ry)))
