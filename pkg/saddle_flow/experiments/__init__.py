# -*- coding: utf-8 -*-
"""
Saddle Flow 实验模块
"""

from .runner import RunOutcome, build_summary, execute_run
from .sweep import PointResult, SweepEngine, point_directory
from .writers import (
    format_float,
    read_csv_columns,
    read_summary,
    write_objective_csv,
    write_states_csv,
    write_summary,
    write_trajectory_csv,
)

__all__ = [
    "PointResult",
    "RunOutcome",
    "SweepEngine",
    "build_summary",
    "execute_run",
    "format_float",
    "point_directory",
    "read_csv_columns",
    "read_summary",
    "write_objective_csv",
    "write_states_csv",
    "write_summary",
    "write_trajectory_csv",
]
