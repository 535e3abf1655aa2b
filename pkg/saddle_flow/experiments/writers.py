# -*- coding: utf-8 -*-
"""
实验结果文件读写

功能：trajectory.csv / states.csv / objective.csv / summary.txt 的写出与回读
作用：固定列顺序与浮点序列化，保证同一配置在同一平台上输出逐字节一致
创建时间：2026-10-19
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

import numpy as np

from ..diagnostics.observables import CSV_COLUMNS, Trajectory

NA = "NA"


def format_float(value: Optional[float]) -> str:
    """最短往返十进制表示；None 写作 NA，非有限值拒绝写出"""
    if value is None:
        return NA
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"拒绝写出非有限值 {value}")
    return repr(value)


def format_value(value: Any) -> str:
    """summary.txt 的值格式"""
    if value is None:
        return NA
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value)) if math.isfinite(value) else str(float(value))
    if isinstance(value, (list, tuple, np.ndarray)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def _write_rows(path: Path, header: Iterable[str], rows: Iterable[Iterable[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(header))
        writer.writerows(rows)


def write_trajectory_csv(path: Path, trajectory: Trajectory) -> None:
    """逐样本诊断，列为 CSV_COLUMNS"""
    _write_rows(
        path,
        CSV_COLUMNS,
        ([format_float(v) for v in row.values()] for row in trajectory.rows),
    )


def write_states_csv(path: Path, trajectory: Trajectory) -> None:
    """逐样本状态分量 t, x_1..x_n, y_1..y_m"""
    n, m = trajectory.problem.n, trajectory.problem.m
    header = ["t"] + [f"x_{i + 1}" for i in range(n)] + [f"y_{j + 1}" for j in range(m)]
    _write_rows(
        path,
        header,
        (
            [format_float(s.t)] + [format_float(v) for v in np.concatenate([s.x, s.y])]
            for s in trajectory.states
        ),
    )


def write_objective_csv(path: Path, trajectory: Trajectory) -> None:
    """目标误差 Φ(x(t)) - Φ(x*)"""
    if trajectory.objective_error is None:
        raise ValueError("该问题没有原始目标函数")
    _write_rows(
        path,
        ("t", "objective_error"),
        (
            [format_float(s.t), format_float(e)]
            for s, e in zip(trajectory.states, trajectory.objective_error)
        ),
    )


def read_csv_columns(path: Path) -> dict[str, np.ndarray]:
    """回读 CSV 为列数组，NA 读为 NaN"""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = list(reader)
    columns: dict[str, np.ndarray] = {}
    for index, name in enumerate(header):
        columns[name] = np.array(
            [math.nan if row[index] == NA else float(row[index]) for row in rows], dtype=float
        )
    return columns


def write_summary(path: Path, summary: Mapping[str, Any]) -> None:
    """key=value 行"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for key, value in summary.items():
            f.write(f"{key}={format_value(value)}\n")


def read_summary(path: Path) -> dict[str, str]:
    summary = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            key, sep, value = line.rstrip("\n").partition("=")
            if sep:
                summary[key] = value
    return summary
