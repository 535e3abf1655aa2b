# -*- coding: utf-8 -*-
"""
功能：单次实验执行器
作用：按运行配置构造问题、积分轨迹、计算诊断并写出 CSV / summary.txt / SVG
创建时间：2026-10-19
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..config.manager import RunConfig
from ..diagnostics.hypotheses import HypothesisReport, check_hypotheses
from ..diagnostics.observables import Trajectory, analyze
from ..diagnostics.rates import (
    dyadic_increments,
    fit_rate,
    head_tail_ratio,
    oscillation_count,
    running_integrals,
    tail_decreasing,
    total_variation,
)
from ..dynamics.params import State
from ..dynamics.system import make_rhs
from ..integrator.dopri import IntegrationError, integrate
from . import plots
from .writers import (
    write_objective_csv,
    write_states_csv,
    write_summary,
    write_trajectory_csv,
)

logger = logging.getLogger(__name__)

TAIL_FRACTION = 0.5
# 超过该接受步数视为长时间运行，写入 summary 并告警
LONG_RUN_STEPS = 100_000


@dataclass
class RunOutcome:
    """单次运行结果"""
    run_dir: Path
    trajectory: Trajectory
    report: HypothesisReport
    summary: dict[str, Any] = field(default_factory=dict)
    duration: float = 0.0

    @property
    def complete(self) -> bool:
        return self.trajectory.complete


def _final(trajectory: Trajectory, name: str) -> Optional[float]:
    return getattr(trajectory.rows[-1], name) if trajectory.rows else None


def _fit_summary(prefix: str, times: np.ndarray, values: np.ndarray) -> dict[str, Any]:
    if times.size < 2:
        return {f"{prefix}_slope": None}
    fit = fit_rate(times, values, TAIL_FRACTION)
    return {
        f"{prefix}_slope": fit.slope,
        f"{prefix}_r2": fit.r_squared,
        f"{prefix}_points": fit.points_used,
        f"{prefix}_skipped": fit.skipped,
        f"{prefix}_reliable": fit.reliable,
        f"{prefix}_window": [fit.window[0], fit.window[1]],
    }


def _series_metrics(prefix: str, values: np.ndarray) -> dict[str, Any]:
    return {
        f"{prefix}_oscillations": oscillation_count(values),
        f"{prefix}_total_variation": total_variation(values),
    }


def build_summary(
    trajectory: Trajectory, report: HypothesisReport, stats: dict[str, Any]
) -> dict[str, Any]:
    """summary.txt 的全部键值，按写出顺序排列"""
    problem, params = trajectory.problem, trajectory.params
    q, s, t0 = params.q, params.s, params.t0
    times = trajectory.times
    summary: dict[str, Any] = {
        "problem": problem.name,
        "n": problem.n,
        "m": problem.m,
        "complete": trajectory.complete,
        "message": trajectory.message or None,
        **stats,
        "samples": len(trajectory),
        "t_first": float(times[0]) if times.size else None,
        "t_last": float(times[-1]) if times.size else None,
    }
    summary.update({
        "base_ok": report.base_ok,
        "thm31_ok": report.thm31_ok,
        "thm42_ok": report.thm42_ok,
        "case": report.case_label,
    })
    summary.update({f"margin[{c.name}]": c.margin for c in report.checks})
    summary.update({f"param_{k}": v for k, v in params.to_dict().items()})

    if not trajectory.rows:
        return summary

    for name in ("gap", "lt_gap", "dist_min_norm", "dist_center", "energy_E", "energy_Ehat"):
        summary[f"final_{name}"] = _final(trajectory, name)
    first, last = trajectory.states[0], trajectory.states[-1]
    summary["initial_norm"] = float(np.linalg.norm(np.concatenate([first.x, first.y])))
    summary["final_norm"] = float(np.linalg.norm(np.concatenate([last.x, last.y])))

    if trajectory.has_column("gap"):
        gap = trajectory.column("gap")
        summary.update(_fit_summary("fit_gap", times, gap))
        summary.update(_series_metrics("gap", gap))
        summary["ratio_scaled_gap"] = head_tail_ratio(times, times ** (2 * q + s) * gap, t0)
    if trajectory.has_column("dist_min_norm"):
        dist = trajectory.column("dist_min_norm")
        summary.update(_fit_summary("fit_dist_min_norm", times, dist))
    if trajectory.has_column("lt_gap"):
        summary.update(_fit_summary("fit_lt_gap", times, trajectory.column("lt_gap")))
    if trajectory.has_column("dist_center"):
        summary.update(_fit_summary("fit_dist_center", times, trajectory.column("dist_center")))
    for key, value in report.predicted.to_dict().items():
        summary[f"predicted_rate_{key}"] = -value

    summary["ratio_scaled_residual_x"] = head_tail_ratio(
        times, times**q * trajectory.column("residual_x"), t0
    )
    summary["ratio_scaled_residual_y"] = head_tail_ratio(
        times, times**q * trajectory.column("residual_y"), t0
    )
    if trajectory.has_column("energy_E"):
        summary["ratio_energy_E"] = head_tail_ratio(times, trajectory.column("energy_E"), t0)

    if len(trajectory) >= 2:
        i_speed, i_delta = running_integrals(trajectory)
        inc_speed = dyadic_increments(times, i_speed, t0)
        inc_delta = dyadic_increments(times, i_delta, t0)
        summary.update({
            "integral_speed": float(i_speed[-1]),
            "integral_delta": float(i_delta[-1]),
            "dyadic_speed": list(inc_speed),
            "dyadic_delta": list(inc_delta),
            "dyadic_speed_tail_decreasing": tail_decreasing(inc_speed),
            "dyadic_delta_tail_decreasing": tail_decreasing(inc_delta),
        })

    if trajectory.objective_error is not None:
        objective = trajectory.objective_error
        summary["final_objective_error"] = float(objective[-1])
        summary.update(_series_metrics("objective", objective))
    return summary


def _write_plots(run_dir: Path, trajectory: Trajectory, report: HypothesisReport) -> None:
    times = trajectory.times
    name = trajectory.problem.name
    gap_series = {
        label: trajectory.column(label)
        for label in ("gap", "lt_gap")
        if trajectory.has_column(label)
    }
    if gap_series:
        plots.plot_loglog(
            run_dir / "gap.svg", times, gap_series, f"{name}: gap", "gap",
            reference_slope=-report.predicted.gap,
        )
    dist_series = {
        label: trajectory.column(label)
        for label in ("dist_min_norm", "dist_center")
        if trajectory.has_column(label)
    }
    if dist_series:
        plots.plot_loglog(
            run_dir / "distance.svg", times, dist_series, f"{name}: distance", "distance"
        )
    components: dict[str, np.ndarray] = {}
    states = trajectory.states
    for i in range(trajectory.problem.n):
        components[f"x_{i + 1}"] = np.array([s.x[i] for s in states])
    for j in range(trajectory.problem.m):
        components[f"y_{j + 1}"] = np.array([s.y[j] for s in states])
    plots.plot_components(run_dir / "components.svg", times, components, f"{name}: components")
    if trajectory.objective_error is not None:
        plots.plot_loglog(
            run_dir / "objective.svg",
            times,
            {"Φ(x(t)) - Φ(x*)": trajectory.objective_error},
            f"{name}: objective error",
            "objective error",
        )


def execute_run(config: RunConfig, run_dir: Path) -> RunOutcome:
    """
    执行一次运行并写出全部产物

    积分中止时仍写出部分轨迹，summary.txt 中 complete=false。

    Raises:
        ConfigError: 配置无效
    """
    config.ensure_valid()
    start = time.perf_counter()
    problem, drawn = config.build_problem()
    params = config.build_params()
    initial = config.build_initial(problem, drawn)
    phase = State(config.t_start, initial.x, initial.y, initial.vx, initial.vy).to_phase()

    try:
        result = integrate(
            make_rhs(problem, params),
            config.t_start,
            config.t_end,
            phase,
            config.build_integrator(),
            config.build_grid(),
        )
    except IntegrationError as exc:
        logger.warning("积分中止: %s", exc)
        result = exc.partial

    trajectory = analyze(problem, params, result)
    report = check_hypotheses(params)
    stats = {
        "accepted_steps": result.accepted_steps,
        "rejected_steps": result.rejected_steps,
        "rhs_evals": result.rhs_evals,
        "long_run": result.accepted_steps > LONG_RUN_STEPS,
    }
    if stats["long_run"]:
        logger.warning(
            "运行 %s 接受 %d 步 (上限提示 %d), 轨迹振荡较快, 耗时可能很长; "
            "可考虑 γ > 0 或缩短 t_end",
            problem.name,
            result.accepted_steps,
            LONG_RUN_STEPS,
        )
    summary = build_summary(trajectory, report, stats)

    run_dir.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(run_dir / "trajectory.csv", trajectory)
    write_states_csv(run_dir / "states.csv", trajectory)
    if trajectory.objective_error is not None:
        write_objective_csv(run_dir / "objective.csv", trajectory)
    write_summary(run_dir / "summary.txt", summary)
    if config.output.get("plots", True) and trajectory.rows:
        _write_plots(run_dir, trajectory, report)

    duration = time.perf_counter() - start
    logger.info(
        "运行 %s 完成, 耗时 %.2fs, 右端项调用 %d 次", problem.name, duration, result.rhs_evals
    )
    return RunOutcome(run_dir, trajectory, report, summary, duration)
