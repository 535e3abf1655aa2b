# -*- coding: utf-8 -*-
"""
功能：参数扫描引擎 - 在网格点上逐个（或并行）执行运行
作用：记录每个点的成败与耗时，由各点写出的 CSV 生成叠加图与对比报告
创建时间：2026-10-19
"""

from __future__ import annotations

import logging
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from ..config.manager import RunConfig, SweepConfig, SweepPoint
from . import plots
from .runner import execute_run
from .writers import format_value, read_csv_columns, read_summary, write_summary

logger = logging.getLogger(__name__)

COMPARISON_COLUMNS = (
    "label",
    "status",
    "complete",
    "final_gap",
    "final_dist_min_norm",
    "gap_oscillations",
    "gap_total_variation",
    "final_objective_error",
    "objective_total_variation",
    "error",
)


@dataclass
class PointResult:
    """网格点执行结果"""
    label: str
    run_dir: Path
    success: bool
    duration: float
    complete: bool = False
    summary: dict[str, str] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    def row(self) -> dict[str, str]:
        values = {
            "label": self.label,
            "status": "ok" if self.success else "failed",
            "complete": format_value(self.complete),
            "error": "; ".join(self.errors) or "NA",
        }
        for key in COMPARISON_COLUMNS:
            values.setdefault(key, self.summary.get(key, "NA"))
        return values


def point_directory(label: str) -> str:
    """网格点标签转目录名"""
    return re.sub(r"[^A-Za-z0-9=.+-]+", "_", label)


def _run_point(label: str, config_data: dict[str, Any], run_dir: str) -> PointResult:
    """在独立上下文中执行单个网格点；异常转为失败记录"""
    start = time.perf_counter()
    path = Path(run_dir)
    try:
        outcome = execute_run(RunConfig(**config_data), path)
    except Exception as exc:
        logger.warning("扫描点 %s 失败: %s", label, exc)
        return PointResult(label, path, False, time.perf_counter() - start, errors=[str(exc)])
    return PointResult(
        label=label,
        run_dir=path,
        success=True,
        duration=time.perf_counter() - start,
        complete=outcome.complete,
        summary=read_summary(path / "summary.txt"),
        errors=[] if outcome.complete else [outcome.trajectory.message],
    )


class SweepEngine:
    """参数扫描引擎"""

    def __init__(self, out_dir: Path, workers: int = 1, console: Optional[Console] = None):
        """
        初始化扫描引擎

        Args:
            out_dir: 输出目录，每个网格点一个子目录
            workers: 并行进程数，1 表示顺序执行
            console: rich 控制台，None 时不打印
        """
        self.out_dir = Path(out_dir)
        self.workers = max(1, int(workers))
        self.console = console

    def run(self, sweep: SweepConfig) -> list[PointResult]:
        """
        执行扫描

        Returns:
            各网格点结果（按网格顺序）
        """
        points = sweep.points()
        self._print_sweep_start(sweep, points)
        jobs = [
            (p.label, p.config.to_dict(), str(self.out_dir / point_directory(p.label)))
            for p in points
        ]
        if self.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [pool.submit(_run_point, *job) for job in jobs]
                results = [f.result() for f in futures]
        else:
            results = [_run_point(*job) for job in jobs]

        for result in results:
            self._print_point(result)
        self._write_overlays(results)
        self._save_report(results)
        self._print_sweep_complete(results)
        return results

    # ==================== 报告 ====================

    def _write_overlays(self, results: list[PointResult]) -> None:
        """叠加图只读取各点已写出的 CSV"""
        gap_runs, dist_runs, objective_runs = {}, {}, {}
        for result in results:
            csv_path = result.run_dir / "trajectory.csv"
            if not result.success or not csv_path.exists():
                continue
            columns = read_csv_columns(csv_path)
            gap_runs[result.label] = (columns["t"], columns["gap"])
            dist_runs[result.label] = (columns["t"], columns["dist_min_norm"])
            objective_path = result.run_dir / "objective.csv"
            if objective_path.exists():
                objective = read_csv_columns(objective_path)
                objective_runs[result.label] = (objective["t"], objective["objective_error"])
        if gap_runs:
            plots.plot_overlay(self.out_dir / "overlay_gap.svg", gap_runs, "gap", "gap")
            plots.plot_overlay(
                self.out_dir / "overlay_distance.svg", dist_runs, "dist_min_norm", "distance"
            )
        if objective_runs:
            plots.plot_overlay(
                self.out_dir / "overlay_objective.svg",
                objective_runs,
                "objective error",
                "objective error",
            )

    def _save_report(self, results: list[PointResult]) -> None:
        """保存 comparison.csv 与 comparison.txt"""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        rows = [r.row() for r in results]
        with open(self.out_dir / "comparison.csv", "w", encoding="utf-8", newline="\n") as f:
            f.write(",".join(COMPARISON_COLUMNS) + "\n")
            for row in rows:
                f.write(",".join(row[c].replace(",", ";") for c in COMPARISON_COLUMNS) + "\n")
        report: dict[str, Any] = {"points": len(results)}
        for row in rows:
            for key in COMPARISON_COLUMNS[1:]:
                report[f"{row['label']}.{key}"] = row[key]
        write_summary(self.out_dir / "comparison.txt", report)

    # ==================== 打印方法 ====================

    def _print_sweep_start(self, sweep: SweepConfig, points: list[SweepPoint]) -> None:
        if self.console:
            axes = ", ".join(f"{k} ∈ {v}" for k, v in sweep.axes.items())
            self.console.print(Panel.fit(
                f"[bold cyan]参数扫描[/bold cyan]\n\n"
                f"轴: {axes}\n"
                f"网格点: {len(points)} 个\n"
                f"输出: {self.out_dir}",
                title="启动",
            ))

    def _print_point(self, result: PointResult) -> None:
        if not self.console:
            return
        if result.success and result.complete:
            self.console.print(
                f"[green]✓[/green] {escape(result.label)}: 完成 ({result.duration:.1f}s)"
            )
        elif result.success:
            self.console.print(
                f"[yellow]⚠[/yellow] {escape(result.label)}: "
                f"积分中止 ({escape('; '.join(result.errors))})"
            )
        else:
            self.console.print(
                f"[red]✗[/red] {result.label}: 失败 ({escape('; '.join(result.errors))})"
            )

    def _print_sweep_complete(self, results: list[PointResult]) -> None:
        if not self.console:
            return
        table = Table(title="扫描对比")
        table.add_column("网格点", style="cyan")
        table.add_column("状态")
        table.add_column("最终间隙", style="yellow")
        table.add_column("最终距离", style="yellow")
        table.add_column("振荡次数", style="magenta")
        table.add_column("全变差", style="magenta")
        for result in results:
            row = result.row()
            status = "[green]成功[/green]" if result.success else "[red]失败[/red]"
            table.add_row(
                result.label,
                status,
                _short(row["final_gap"]),
                _short(row["final_dist_min_norm"]),
                row["gap_oscillations"],
                _short(row["gap_total_variation"]),
            )
        self.console.print(table)
        succeeded = sum(1 for r in results if r.success)
        total = sum(r.duration for r in results)
        self.console.print(f"\n总计: {succeeded}/{len(results)} 成功, 总耗时: {total:.1f}s")


def _short(value: str) -> str:
    try:
        return f"{float(value):.4e}"
    except ValueError:
        return value
