# -*- coding: utf-8 -*-
"""
动力系统参数与状态

功能：标量参数组 (α, q, s, p, c, γ, t0)、状态 (t, x, y, ẋ, ẏ) 及其一阶相空间展平形式
作用：在构造时校验参数不变量，保证外推参数 θ(t) 在 [t0, ∞) 上有定义
创建时间：2026-10-19
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np


class ParameterError(ValueError):
    """参数不变量被违反"""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


def parameter_violations(
    alpha: float, q: float, s: float, p: float, c: float, gamma: float, t0: float
) -> list[tuple[str, str]]:
    """
    列出全部违反的参数不变量

    Returns:
        (不变量名称, 说明) 列表，空列表表示参数合法
    """
    violations: list[tuple[str, str]] = []
    values = {"alpha": alpha, "q": q, "s": s, "p": p, "c": c, "gamma": gamma, "t0": t0}
    for key, value in values.items():
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            violations.append((f"{key}_finite", f"{key} 必须是有限实数, 实际 {value!r}"))
    if violations:
        return violations

    if not alpha > 1:
        violations.append(("alpha>1", f"alpha 必须大于 1, 实际 {alpha}"))
    if not 0 < q < 1:
        violations.append(("0<q<1", f"q 必须在 (0, 1) 内, 实际 {q}"))
    if not s > 0:
        violations.append(("s>0", f"s 必须为正, 实际 {s}"))
    if not p > 0:
        violations.append(("p>0", f"p 必须为正, 实际 {p}"))
    if not c >= 0:
        violations.append(("c>=0", f"c 必须非负, 实际 {c}"))
    if not gamma >= 0:
        violations.append(("gamma>=0", f"gamma 必须非负, 实际 {gamma}"))
    if not t0 > 0:
        violations.append(("t0>0", f"t0 必须为正, 实际 {t0}"))
    elif gamma > 0 and s > 0 and 0 < q and not t0 > (gamma * q) ** (1.0 / (s + 1.0)):
        threshold = (gamma * q) ** (1.0 / (s + 1.0))
        violations.append(
            ("t0>(gamma*q)^(1/(s+1))", f"t0={t0} 必须大于 (γq)^(1/(s+1))={threshold:.6g}")
        )
    return violations


@dataclass(frozen=True)
class DynamicsParams:
    """
    动力系统参数

    alpha: 粘性阻尼系数 α > 1（阻尼项 α/t^q）
    q: 慢衰减指数 0 < q < 1
    s: 时间尺度指数 s > 0（梯度力乘 t^s）
    p: Tikhonov 衰减指数 p > 0（正则项 c/(2t^p)）
    c: Tikhonov 系数 c >= 0
    gamma: Hessian 阻尼系数 γ >= 0
    t0: 初始时刻 t0 > 0
    """

    alpha: float = 2.5
    q: float = 0.42
    s: float = 0.005
    p: float = 0.268
    c: float = 10.0
    gamma: float = 0.8
    t0: float = 1.0

    def __post_init__(self) -> None:
        violations = parameter_violations(
            self.alpha, self.q, self.s, self.p, self.c, self.gamma, self.t0
        )
        if violations:
            invariant, message = violations[0]
            raise ParameterError(invariant, message)

    def replace(self, **changes: float) -> "DynamicsParams":
        return DynamicsParams(**{**asdict(self), **changes})

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class State:
    """动力系统在时刻 t 的状态 (x, y, ẋ, ẏ)"""

    t: float
    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def m(self) -> int:
        return self.y.shape[0]

    def is_finite(self) -> bool:
        return bool(
            math.isfinite(self.t)
            and np.all(np.isfinite(self.x))
            and np.all(np.isfinite(self.y))
            and np.all(np.isfinite(self.vx))
            and np.all(np.isfinite(self.vy))
        )

    def to_phase(self) -> np.ndarray:
        """展平为相空间向量 [x | y | ẋ | ẏ]"""
        return np.concatenate([self.x, self.y, self.vx, self.vy])

    @classmethod
    def from_phase(
        cls, t: float, phase: np.ndarray, n: int, m: int, copy: bool = True
    ) -> "State":
        """由相空间向量还原状态；copy=False 时各分量是 phase 的只读视图"""
        phase = np.asarray(phase, dtype=float)
        if phase.shape != (2 * (n + m),):
            raise ValueError(f"相空间向量长度应为 {2 * (n + m)}, 实际 {phase.shape}")
        if copy:
            phase = phase.copy()
        else:
            phase = phase.view()
            phase.flags.writeable = False
        return cls(
            t=float(t),
            x=phase[:n],
            y=phase[n:n + m],
            vx=phase[n + m:2 * n + m],
            vy=phase[2 * n + m:],
        )
