# -*- coding: utf-8 -*-
"""
收敛速率估计

功能：尾部对数-对数斜率拟合、累积积分、二进窗口增量、首尾有界比、振荡度量
作用：把 O(1/t^κ) 一类渐近结论转化为可在有限时域上检查的数值指标
创建时间：2026-10-19
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import scipy.integrate
import scipy.signal
import scipy.stats

if TYPE_CHECKING:
    from .observables import Trajectory

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 5


@dataclass(frozen=True)
class RateFit:
    """尾部窗口上 log v = slope·log t + intercept 的最小二乘拟合"""

    window: tuple[float, float]
    slope: float
    intercept: float
    r_squared: float
    points_used: int
    skipped: int = 0

    @property
    def reliable(self) -> bool:
        return self.points_used >= MIN_FIT_POINTS and math.isfinite(self.slope)


def fit_rate(times: np.ndarray, values: np.ndarray, tail_fraction: float = 0.5) -> RateFit:
    """
    在尾部样本上拟合对数-对数斜率

    尾部取 t >= t 的 (1 - tail_fraction) 分位数的样本；
    v <= 0 或非有限的样本被跳过并计数。
    可用点少于 5 个时结果标记为不可靠。
    """
    if not 0 < tail_fraction < 1:
        raise ValueError(f"tail_fraction 必须在 (0, 1) 内, 实际 {tail_fraction}")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise ValueError(f"时间与数值长度不一致: {times.shape} / {values.shape}")
    if times.size == 0 or np.any(times <= 0):
        raise ValueError("拟合需要非空且全为正的时间序列")

    cutoff = np.quantile(times, 1.0 - tail_fraction)
    tail = times >= cutoff
    usable = tail & np.isfinite(values) & (values > 0)
    skipped = int(np.count_nonzero(tail & ~usable))
    t_used, v_used = times[usable], values[usable]
    window = (float(times[tail].min()), float(times[tail].max()))

    if t_used.size < 2 or np.ptp(t_used) == 0:
        logger.warning("速率拟合可用点不足 (%d 个)", t_used.size)
        return RateFit(window, math.nan, math.nan, 0.0, int(t_used.size), skipped)

    fit = scipy.stats.linregress(np.log(t_used), np.log(v_used))
    r_squared = min(1.0, max(0.0, float(fit.rvalue) ** 2))
    result = RateFit(
        window=window,
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=r_squared,
        points_used=int(t_used.size),
        skipped=skipped,
    )
    if not result.reliable:
        logger.warning("速率拟合只用了 %d 个点, 结果不可靠", result.points_used)
    return result


def cumulative_integral(times: np.ndarray, integrand: np.ndarray) -> np.ndarray:
    """梯形公式累积积分，首项为 0"""
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise ValueError("累积积分至少需要 2 个样本")
    return scipy.integrate.cumulative_trapezoid(np.asarray(integrand, float), times, initial=0.0)


def running_integrals(trajectory: "Trajectory") -> tuple[np.ndarray, np.ndarray]:
    """
    沿轨迹的两个累积积分

    I_speed(t) = ∫ τ^q ‖(ẋ, ẏ)‖² dτ，I_delta(t) = ∫ τ^(2q+s) Δ(τ) dτ
    """
    q, s = trajectory.params.q, trajectory.params.s
    t = trajectory.times
    speed = trajectory.column("speed")
    delta = trajectory.column("delta")
    return (
        cumulative_integral(t, t**q * speed**2),
        cumulative_integral(t, t ** (2 * q + s) * delta),
    )


def dyadic_windows(t0: float, t_end: float) -> list[tuple[float, float]]:
    """[t0·2^k, t0·2^(k+1)] 中完整落在时域内的窗口"""
    windows = []
    a = t0
    while 2 * a <= t_end * (1 + 1e-12):
        windows.append((a, 2 * a))
        a *= 2
    return windows


def dyadic_increments(times: np.ndarray, cumulative: np.ndarray, t0: float) -> np.ndarray:
    """累积积分在每个二进窗口上的增量（窗口端点线性插值）"""
    times = np.asarray(times, dtype=float)
    windows = dyadic_windows(t0, float(times[-1]))
    if not windows:
        return np.zeros(0)
    edges = np.array([windows[0][0]] + [b for _, b in windows])
    return np.diff(np.interp(edges, times, cumulative))


def tail_decreasing(increments: np.ndarray) -> bool:
    """后半部分窗口增量严格递减"""
    increments = np.asarray(increments, dtype=float)
    if increments.size < 2:
        return False
    tail = increments[increments.size // 2:] if increments.size >= 4 else increments
    return bool(np.all(np.diff(tail) < 0))


def head_tail_ratio(times: np.ndarray, values: np.ndarray, t0: float) -> float:
    """max_{t >= 2t0} v / max_{t0 <= t <= 2t0} v，尾部无样本时为 NaN"""
    times = np.asarray(times, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    head = values[(times >= t0) & (times <= 2 * t0)]
    tail = values[times >= 2 * t0]
    if head.size == 0 or tail.size == 0 or np.all(np.isnan(head)) or np.all(np.isnan(tail)):
        return math.nan
    head_max = float(np.nanmax(head))
    tail_max = float(np.nanmax(tail))
    if head_max == 0.0:
        return 0.0 if tail_max == 0.0 else math.inf
    return tail_max / head_max


def oscillation_count(values: np.ndarray) -> int:
    """序列严格局部极大值的个数"""
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        return 0
    return int(scipy.signal.argrelmax(values)[0].size)


def total_variation(values: np.ndarray) -> float:
    """Σ |v_(k+1) - v_k|"""
    values = np.asarray(values, dtype=float)
    return float(np.sum(np.abs(np.diff(values)))) if values.size > 1 else 0.0
