# -*- coding: utf-8 -*-
"""
自适应显式 Runge-Kutta 积分器

功能：Dormand-Prince 5(4) 嵌入对 + PI 步长控制 + 四阶连续扩展采样
作用：在调用者给定的时间网格上输出相空间轨迹，统计接受/拒绝步数与右端项调用次数
创建时间：2026-10-19
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

logger = logging.getLogger(__name__)

RHS = Callable[[float, np.ndarray], np.ndarray]

# Butcher 表
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# 五阶解与嵌入四阶解之差
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# 四阶连续扩展: y(t + θh) = y + h * (K^T P) [θ, θ², θ³, θ⁴]
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

# PI 控制参数
SAFETY = 0.9
BETA = 0.04
EXPONENT = 0.2 - 0.75 * BETA
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
UNDERFLOW_RATIO = 1e-14


@dataclass
class IntegratorConfig:
    """积分器配置"""

    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    initial_step: Optional[float] = None  # None 表示自动选择
    max_step: Optional[float] = None  # None 表示 t_end - t_start
    max_rhs_evals: int = 10**8
    fixed_step: Optional[float] = None  # 设置后关闭误差控制

    def validate(self) -> list[str]:
        errors = []
        if not self.rel_tol > 0:
            errors.append(f"rel_tol 必须为正, 实际 {self.rel_tol}")
        if not self.abs_tol > 0:
            errors.append(f"abs_tol 必须为正, 实际 {self.abs_tol}")
        if self.max_step is not None and not self.max_step > 0:
            errors.append(f"max_step 必须为正, 实际 {self.max_step}")
        if self.initial_step is not None and not self.initial_step > 0:
            errors.append(f"initial_step 必须为正, 实际 {self.initial_step}")
        if self.fixed_step is not None and not self.fixed_step > 0:
            errors.append(f"fixed_step 必须为正, 实际 {self.fixed_step}")
        if self.max_rhs_evals < 1:
            errors.append(f"max_rhs_evals 必须至少为 1, 实际 {self.max_rhs_evals}")
        return errors


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """严格递增的采样时刻"""

    times: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float).ravel()
        if times.size == 0:
            raise ValueError("采样网格不能为空")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("采样网格必须严格递增")
        object.__setattr__(self, "times", times)

    @classmethod
    def log(cls, t_start: float, t_end: float, samples: int = 200) -> "SampleGrid":
        if t_end == t_start or samples == 1:
            return cls(np.array([t_start]))
        return cls(np.geomspace(t_start, t_end, samples))

    @classmethod
    def linear(cls, t_start: float, t_end: float, samples: int = 200) -> "SampleGrid":
        if t_end == t_start or samples == 1:
            return cls(np.array([t_start]))
        return cls(np.linspace(t_start, t_end, samples))

    def __len__(self) -> int:
        return int(self.times.size)


@dataclass
class IntegrationResult:
    """积分结果：网格上的样本与步数统计"""

    times: np.ndarray
    states: np.ndarray
    accepted_steps: int = 0
    rejected_steps: int = 0
    rhs_evals: int = 0
    largest_step: float = 0.0
    complete: bool = True
    message: str = ""
    final_time: float = 0.0

    def __len__(self) -> int:
        return int(self.times.size)

    def __iter__(self) -> Iterator[tuple[float, np.ndarray]]:
        for t, z in zip(self.times, self.states):
            yield float(t), z


class IntegrationError(RuntimeError):
    """积分中止时抛出，携带部分结果

    触发条件：步长下溢、右端项失败、超出调用次数上限。
    """

    def __init__(self, message: str, partial: IntegrationResult):
        super().__init__(message)
        self.partial = partial


@dataclass
class _Workspace:
    """单次积分的可变工作区"""

    rhs: RHS
    config: IntegratorConfig
    grid: np.ndarray
    sample_times: list[float] = field(default_factory=list)
    sample_states: list[np.ndarray] = field(default_factory=list)
    next_index: int = 0
    accepted: int = 0
    rejected: int = 0
    evals: int = 0
    largest_step: float = 0.0

    def call(self, t: float, z: np.ndarray) -> np.ndarray:
        self.evals += 1
        return np.asarray(self.rhs(t, z), dtype=float)

    def record(self, t: float, z: np.ndarray) -> None:
        self.sample_times.append(float(t))
        self.sample_states.append(np.array(z, dtype=float, copy=True))
        self.next_index += 1

    def result(self, t: float, dim: int, complete: bool, message: str = "") -> IntegrationResult:
        states = np.array(self.sample_states) if self.sample_states else np.zeros((0, dim))
        return IntegrationResult(
            times=np.array(self.sample_times),
            states=states,
            accepted_steps=self.accepted,
            rejected_steps=self.rejected,
            rhs_evals=self.evals,
            largest_step=self.largest_step,
            complete=complete,
            message=message,
            final_time=t,
        )


def _error_norm(
    err: np.ndarray, y: np.ndarray, y_new: np.ndarray, config: IntegratorConfig
) -> float:
    """逐分量误差比 |e_i| / (atol + rtol·max(|y_i|, |y_new_i|)) 的最大值"""
    if err.size == 0:
        return 0.0
    scale = config.abs_tol + config.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def _rms(v: np.ndarray) -> float:
    return float(np.sqrt(np.mean(v * v))) if v.size else 0.0


def _initial_step(
    ws: _Workspace, t: float, y: np.ndarray, f: np.ndarray, span: float, max_step: float
) -> float:
    """按 ‖rhs(t0, z0)‖ 的尺度自动选择初始步长"""
    config = ws.config
    scale = config.abs_tol + config.rel_tol * np.abs(y)
    d0 = _rms(y / scale)
    d1 = _rms(f / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = ws.call(t + h0, y + h0 * f)
    d2 = _rms((f1 - f) / scale) / h0
    largest = max(d1, d2)
    if largest <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / largest) ** (1.0 / 5.0)
    return min(100 * h0, h1, max_step, span)


def _step(
    ws: _Workspace, t: float, y: np.ndarray, f: np.ndarray, h: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """一个 Dormand-Prince 步，返回 (y_new, 阶段导数矩阵 K, 误差向量)"""
    K = np.empty((7, y.size))
    K[0] = f
    for i in range(1, 6):
        K[i] = ws.call(t + C[i] * h, y + h * (A[i] @ K[:i]))
    y_new = y + h * (A[6] @ K[:6])
    K[6] = ws.call(t + h, y_new)
    return y_new, K, h * (E @ K)


def _sample_step(
    ws: _Workspace,
    t: float,
    h: float,
    t_new: float,
    y: np.ndarray,
    y_new: np.ndarray,
    K: np.ndarray,
) -> None:
    """对落在 (t, t_new] 内的网格点做连续扩展插值"""
    grid = ws.grid
    Q = None
    while ws.next_index < grid.size and grid[ws.next_index] <= t_new:
        ts = grid[ws.next_index]
        if ts == t_new:
            ws.record(ts, y_new)
            continue
        if Q is None:
            Q = K.T @ P
        frac = (ts - t) / h
        powers = np.array([frac, frac**2, frac**3, frac**4])
        ws.record(ts, y + h * (Q @ powers))


def integrate(
    rhs: RHS,
    t_start: float,
    t_end: float,
    initial: np.ndarray,
    config: Optional[IntegratorConfig] = None,
    grid: Optional[SampleGrid] = None,
) -> IntegrationResult:
    """
    积分 z' = rhs(t, z) 从 t_start 到 t_end

    Args:
        rhs: 纯函数右端项
        t_start: 起始时刻
        t_end: 终止时刻 (>= t_start)
        initial: 初始相空间向量
        config: 积分器配置
        grid: 采样网格，默认对数（t_start > 0 时）或线性等距 200 点

    Returns:
        IntegrationResult

    Raises:
        IntegrationError: 步长下溢、右端项失败或超出 max_rhs_evals，携带部分结果
    """
    config = config or IntegratorConfig()
    problems = config.validate()
    if problems:
        raise ValueError("; ".join(problems))
    if not t_end >= t_start:
        raise ValueError(f"t_end={t_end} 必须不小于 t_start={t_start}")
    y = np.array(initial, dtype=float, copy=True)
    if not np.all(np.isfinite(y)):
        raise ValueError("初始向量含非有限值")
    if grid is None:
        grid = (SampleGrid.log if t_start > 0 else SampleGrid.linear)(t_start, t_end)
    times = grid.times
    if times[0] < t_start or times[-1] > t_end:
        raise ValueError(
            f"采样网格 [{times[0]}, {times[-1]}] 超出积分区间 [{t_start}, {t_end}]"
        )

    ws = _Workspace(rhs=rhs, config=config, grid=times)
    t = float(t_start)
    if times[0] == t:
        ws.record(t, y)
    if t_end == t_start:
        return ws.result(t, y.size, complete=True)

    span = t_end - t_start
    n_steps = 0
    max_step = min(config.max_step or span, span)
    try:
        f = ws.call(t, y)
        if config.fixed_step is not None:
            n_steps = max(1, math.ceil(span / config.fixed_step - 1e-12))
            h = span / n_steps
        else:
            h = config.initial_step or _initial_step(ws, t, y, f, span, max_step)
    except Exception as exc:
        partial = ws.result(t, y.size, False, str(exc))
        raise IntegrationError(f"右端项在 t={t} 处失败: {exc}", partial) from exc

    err_prev = 1e-4
    last_rejected = False
    step_index = 0
    while t < t_end:
        if config.fixed_step is None:
            h = min(h, max_step)
        if config.fixed_step is not None:
            if step_index == n_steps - 1:
                t_new = t_end
            else:
                t_new = t_start + (step_index + 1) * (span / n_steps)
            h = t_new - t
        elif t + 1.01 * h >= t_end:
            # 末步不超过 max_step，剩余略多于 max_step 时对半分
            remaining = t_end - t
            if remaining <= max_step:
                h, t_new = remaining, t_end
            else:
                h = 0.5 * remaining
                t_new = t + h
        else:
            t_new = t + h

        if h < UNDERFLOW_RATIO * max(abs(t), 1.0):
            message = f"步长下溢: t={t:.6g}, h={h:.3e}"
            logger.warning(message)
            raise IntegrationError(message, ws.result(t, y.size, False, message))
        if ws.evals + 6 > config.max_rhs_evals:
            message = f"右端项调用次数超过上限 {config.max_rhs_evals} (t={t:.6g})"
            logger.warning(message)
            raise IntegrationError(message, ws.result(t, y.size, False, message))

        try:
            y_new, K, err = _step(ws, t, y, f, h)
        except Exception as exc:
            message = f"右端项在 t≈{t:.6g} 处失败: {exc}"
            raise IntegrationError(message, ws.result(t, y.size, False, message)) from exc

        if config.fixed_step is not None:
            accept, factor = True, 1.0
        else:
            ratio = _error_norm(err, y, y_new, config)
            if not math.isfinite(ratio):
                accept, factor = False, MIN_FACTOR
            elif ratio <= 1.0:
                accept = True
                ratio = max(ratio, 1e-10)
                factor = SAFETY * ratio ** (-EXPONENT) * err_prev**BETA
                factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
                if last_rejected:
                    factor = min(factor, 1.0)
                err_prev = max(ratio, 1e-4)
            else:
                accept = False
                factor = max(MIN_FACTOR, SAFETY * ratio ** (-EXPONENT))

        if accept:
            _sample_step(ws, t, h, t_new, y, y_new, K)
            t, y, f = t_new, y_new, K[6]
            ws.accepted += 1
            ws.largest_step = max(ws.largest_step, h)
            step_index += 1
            last_rejected = False
        else:
            ws.rejected += 1
            last_rejected = True
        if config.fixed_step is None:
            h = h * factor

    logger.debug(
        "积分完成: 接受 %d 步, 拒绝 %d 步, 右端项调用 %d 次",
        ws.accepted,
        ws.rejected,
        ws.evals,
    )
    return ws.result(t, y.size, complete=True)
