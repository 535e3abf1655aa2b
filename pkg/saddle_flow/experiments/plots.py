# -*- coding: utf-8 -*-
"""
SVG 图表

功能：速率曲线（对数-对数）、分量曲线（线性）与扫描叠加图
作用：所有图表只由已写出的序列绘制，固定 hashsalt 与元数据使 SVG 可复现
创建时间：2026-10-19
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "saddle-flow"
SVG_METADATA = {"Date": None, "Creator": "saddle-flow"}


def _positive(values: np.ndarray) -> np.ndarray:
    """对数坐标下隐藏非正值"""
    values = np.asarray(values, dtype=float)
    return np.where(values > 0, values, np.nan)


def _save(fig: plt.Figure, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)


def plot_loglog(
    path: Path,
    times: np.ndarray,
    series: Mapping[str, np.ndarray],
    title: str,
    ylabel: str,
    reference_slope: Optional[float] = None,
) -> None:
    """多条曲线的对数-对数图，可选叠加 t^slope 参考线"""
    fig, ax = plt.subplots(figsize=(7, 5))
    for label, values in series.items():
        ax.plot(times, _positive(values), label=label, linewidth=1.2)
    if reference_slope is not None and series:
        first = _positive(next(iter(series.values())))
        finite = np.isfinite(first)
        if np.any(finite):
            anchor_t, anchor_v = times[finite][0], first[finite][0]
            ax.plot(
                times,
                anchor_v * (times / anchor_t) ** reference_slope,
                "k--",
                linewidth=0.8,
                label=f"t^{reference_slope:.3g}",
            )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    _save(fig, path)


def plot_components(
    path: Path, times: np.ndarray, components: Mapping[str, np.ndarray], title: str
) -> None:
    """状态分量随时间变化（线性坐标）"""
    fig, ax = plt.subplots(figsize=(7, 5))
    for label, values in components.items():
        ax.plot(times, values, label=label, linewidth=1.0)
    ax.set_xlabel("t")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if len(components) <= 8:
        ax.legend()
    _save(fig, path)


def plot_overlay(
    path: Path, runs: Mapping[str, tuple[np.ndarray, np.ndarray]], title: str, ylabel: str
) -> None:
    """扫描各网格点同一量的叠加对数-对数图"""
    fig, ax = plt.subplots(figsize=(7, 5))
    for label, (times, values) in runs.items():
        ax.plot(times, _positive(values), label=label, linewidth=1.2)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    _save(fig, path)
