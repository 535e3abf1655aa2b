# -*- coding: utf-8 -*-
"""
功能：Saddle Flow CLI 主入口
作用：提供命令行界面，执行单次运行、参数扫描、假设检查与两个内置实验
创建时间：2026-10-19
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from . import __description__, __version__
from .config import ConfigError, ConfigManager, RunConfig, SweepConfig, apply_overrides
from .config.manager import get_config_manager
from .diagnostics import check_hypotheses
from .dynamics import DynamicsParams, ParameterError, parameter_violations
from .experiments import SweepEngine, execute_run

EXIT_OK = 0
EXIT_HYPOTHESIS = 1
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3

EXAMPLE51_GAMMAS = [0.0, 0.8, 1.0, 1.2, 1.4]
EXAMPLE52_QS = [0.6, 0.7, 0.8]
EXAMPLE52_GAMMAS = [0.0, 0.2]
EXAMPLE52_PARAMS = {"alpha": 3.0, "s": 0.4, "p": 2.3, "c": 5.0, "t0": 1.0}


class SaddleFlowCLI:
    """Saddle Flow 命令行接口"""

    def __init__(self) -> None:
        self.console = Console()
        self.parser = self._create_parser()

    def _create_parser(self) -> argparse.ArgumentParser:
        """创建命令行参数解析器"""
        # 全局选项既可写在子命令前也可写在子命令后
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--out", default=argparse.SUPPRESS, help="输出目录")
        common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="随机种子")
        common.add_argument("--rel-tol", type=float, default=argparse.SUPPRESS, help="相对容差")
        common.add_argument("--abs-tol", type=float, default=argparse.SUPPRESS, help="绝对容差")
        common.add_argument(
            "-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
            help="输出调试日志",
        )

        parser = argparse.ArgumentParser(
            prog="saddle-flow",
            description=__description__,
            formatter_class=argparse.RawDescriptionHelpFormatter,
            parents=[common],
            epilog="""
示例:
  saddle-flow init saddle-flow.yaml             写出默认配置
  saddle-flow run --config saddle-flow.yaml     执行单次运行
  saddle-flow sweep --config sweep.yaml         执行参数扫描
  saddle-flow check --q 0.42 --p 0.268          检查收敛假设
  saddle-flow example51 --gamma 0 0.8           秩一耦合二次实验
  saddle-flow example52 --q 0.6 --gamma 0 0.2   ℓ2 正则化最小二乘实验
            """,
        )
        parser.set_defaults(out=None, seed=None, rel_tol=None, abs_tol=None, verbose=False)
        parser.add_argument("-V", "--version", action="version", version=f"%(prog)s {__version__}")

        subparsers = parser.add_subparsers(
            dest="command",
            title="可用命令",
            description="使用 'saddle-flow <command> -h' 查看帮助",
        )

        init_parser = subparsers.add_parser(
            "init", help="写出默认配置", description="写出带默认值的 YAML 配置文件",
            parents=[common],
        )
        init_parser.add_argument(
            "file", nargs="?", default=ConfigManager.CONFIG_FILENAME, help="配置文件路径"
        )

        run_parser = subparsers.add_parser(
            "run", help="执行单次运行", description="按配置文件积分并写出诊断",
            parents=[common],
        )
        run_parser.add_argument("--config", required=True, help="配置文件路径")

        sweep_parser = subparsers.add_parser(
            "sweep", help="执行参数扫描", description="按 sweep 段展开网格并逐点运行",
            parents=[common],
        )
        sweep_parser.add_argument("--config", required=True, help="配置文件路径")

        check_parser = subparsers.add_parser(
            "check", help="检查收敛假设", description="打印各定理假设的裕量",
            parents=[common],
        )
        defaults = DynamicsParams()
        for name in ("alpha", "q", "s", "p", "c", "gamma", "t0"):
            check_parser.add_argument(
                f"--{name}", type=float, default=getattr(defaults, name), help=f"参数 {name}"
            )
        check_parser.add_argument(
            "--theorem", choices=["31", "42"], default=None,
            help="只检查指定结论 (31: 速率, 42: 强收敛)；"
            "缺省时任一成立即通过",
        )

        ex51_parser = subparsers.add_parser(
            "example51", help="秩一耦合二次实验", description="扫描 γ 与 c",
            parents=[common],
        )
        ex51_parser.add_argument("--gamma", type=float, nargs="+", default=EXAMPLE51_GAMMAS)
        ex51_parser.add_argument("--c", type=float, nargs="+", default=[10.0])
        ex51_parser.add_argument(
            "--coefficients", type=float, nargs=4, default=[1.0, 10.0, 10.0, 1.0],
            metavar=("M", "N", "J", "K"), help="f, g, K 的系数",
        )
        ex51_parser.add_argument("--t-end", type=float, default=50.0, help="终止时刻")
        ex51_parser.add_argument("--samples", type=int, default=200, help="采样点数")

        ex52_parser = subparsers.add_parser(
            "example52", help="ℓ2 正则化最小二乘实验", description="扫描 q 与 γ",
            parents=[common],
        )
        ex52_parser.add_argument("--m", type=int, default=20, help="K 的行数")
        ex52_parser.add_argument("--n", type=int, default=50, help="K 的列数")
        ex52_parser.add_argument("--q", type=float, nargs="+", default=EXAMPLE52_QS)
        ex52_parser.add_argument("--gamma", type=float, nargs="+", default=EXAMPLE52_GAMMAS)
        ex52_parser.add_argument("--eta", type=float, default=1.0, help="正则化系数 η")
        ex52_parser.add_argument("--t-end", type=float, default=200.0, help="终止时刻")
        ex52_parser.add_argument("--samples", type=int, default=200, help="采样点数")
        ex52_parser.add_argument("--workers", type=int, default=1, help="并行进程数")

        return parser

    def run(self, args: Optional[list[str]] = None) -> int:
        """
        运行 CLI

        Args:
            args: 命令行参数

        Returns:
            退出码
        """
        parsed_args = self.parser.parse_args(args)
        self._setup_logging(parsed_args.verbose)

        if parsed_args.command is None:
            self._print_banner()
            self.parser.print_help()
            return EXIT_OK

        # 路由到对应命令
        command_handler = getattr(self, f"_cmd_{parsed_args.command}", None)
        if command_handler is None:
            self.console.print(f"[red]未知命令: {parsed_args.command}[/red]")
            return EXIT_CONFIG

        try:
            return command_handler(parsed_args)
        except (ConfigError, ParameterError) as e:
            self._print_config_errors(getattr(e, "errors", [str(e)]))
            return EXIT_CONFIG
        except Exception as e:
            if parsed_args.verbose:
                self.console.print_exception()
            self.console.print(f"[red]错误: {e}[/red]")
            return EXIT_FAILURE

    def _setup_logging(self, verbose: bool) -> None:
        logging.basicConfig(
            level=logging.DEBUG if verbose else logging.WARNING,
            format="%(message)s",
            handlers=[RichHandler(console=self.console, show_path=False)],
            force=True,
        )

    # ==================== 命令处理器 ====================

    def _cmd_init(self, args: argparse.Namespace) -> int:
        """写出默认配置"""
        manager = ConfigManager(Path(args.file))
        if manager.exists():
            self.console.print(f"[yellow]配置文件已存在: {manager.config_path}[/yellow]")
            return EXIT_OK
        manager.create()
        self.console.print(f"[green]✓[/green] 已写出默认配置: {manager.config_path}")
        self.console.print("\n[dim]下一步:[/dim]")
        self.console.print("  1. 编辑配置中的 problem / params / horizon 段")
        self.console.print(f"  2. 运行 'saddle-flow run --config {args.file}'")
        return EXIT_OK

    def _cmd_run(self, args: argparse.Namespace) -> int:
        """执行单次运行"""
        manager = get_config_manager(Path(args.config))
        if not manager.exists():
            self._print_config_errors([f"配置文件不存在: {args.config}"])
            return EXIT_CONFIG
        config = self._with_globals(manager.load(), args)
        return self._execute(config)

    def _cmd_sweep(self, args: argparse.Namespace) -> int:
        """执行参数扫描"""
        manager = get_config_manager(Path(args.config))
        if not manager.exists():
            self._print_config_errors([f"配置文件不存在: {args.config}"])
            return EXIT_CONFIG
        sweep = manager.load_sweep()
        sweep = SweepConfig(base=self._with_globals(sweep.base, args), axes=sweep.axes)
        return self._execute_sweep(sweep)

    def _cmd_check(self, args: argparse.Namespace) -> int:
        """检查收敛假设"""
        values = {k: getattr(args, k) for k in ("alpha", "q", "s", "p", "c", "gamma", "t0")}
        violations = parameter_violations(**values)
        if violations:
            self._print_config_errors([f"{name}: {message}" for name, message in violations])
            return EXIT_CONFIG
        report = check_hypotheses(DynamicsParams(**values))
        self.console.print(report.to_text(), markup=False, highlight=False)
        self.console.print("")
        for line in report.to_key_values():
            self.console.print(line, markup=False, highlight=False)
        return EXIT_OK if report.holds(args.theorem) else EXIT_HYPOTHESIS

    def _cmd_example51(self, args: argparse.Namespace) -> int:
        """秩一耦合二次实验：初值 x=y=(1,1.5), ẋ=ẏ=(1,1)"""
        base = RunConfig.from_dict({
            "problem": {"kind": "example51", "coefficients": list(args.coefficients)},
            "horizon": {"t_end": args.t_end, "samples": args.samples},
            "output": {"dir": "output/example51"},
        })
        sweep = SweepConfig(
            base=self._with_globals(base, args),
            axes={"gamma": list(args.gamma), "c": list(args.c)},
        )
        return self._execute_sweep(sweep)

    def _cmd_example52(self, args: argparse.Namespace) -> int:
        """ℓ2 正则化最小二乘实验：K、b 与初值取自标准正态分布"""
        base = RunConfig.from_dict({
            "problem": {"kind": "example52", "m": args.m, "n": args.n, "eta": args.eta},
            "params": dict(EXAMPLE52_PARAMS),
            "horizon": {"t_end": args.t_end, "samples": args.samples},
            "initial": {"mode": "random"},
            "output": {"dir": "output/example52", "workers": args.workers},
        })
        sweep = SweepConfig(
            base=self._with_globals(base, args),
            axes={"q": list(args.q), "gamma": list(args.gamma)},
        )
        return self._execute_sweep(sweep)

    # ==================== 执行 ====================

    @staticmethod
    def _with_globals(config: RunConfig, args: argparse.Namespace) -> RunConfig:
        return apply_overrides(
            config, out=args.out, seed=args.seed, rel_tol=args.rel_tol, abs_tol=args.abs_tol
        )

    def _execute(self, config: RunConfig) -> int:
        ok, errors = config.validate()
        if not ok:
            self._print_config_errors(errors)
            return EXIT_CONFIG
        run_dir = Path(config.output["dir"])
        with self.console.status("[cyan]积分中...[/cyan]"):
            outcome = execute_run(config, run_dir)
        self._print_run_summary(outcome.summary, run_dir)
        if not outcome.complete:
            self.console.print(
                "[red]✗ 积分中止, 已写出部分轨迹 (complete=false): "
                f"{escape(outcome.trajectory.message)}[/red]"
            )
            return EXIT_INTEGRATION
        return EXIT_OK

    def _execute_sweep(self, sweep: SweepConfig) -> int:
        ok, errors = sweep.validate()
        if not ok:
            self._print_config_errors(errors)
            return EXIT_CONFIG
        out_dir = Path(sweep.base.output["dir"])
        engine = SweepEngine(out_dir, int(sweep.base.output.get("workers", 1)), self.console)
        results = engine.run(sweep)
        if all(r.success and r.complete for r in results):
            return EXIT_OK
        return EXIT_INTEGRATION

    # ==================== 打印方法 ====================

    def _print_banner(self) -> None:
        """打印横幅"""
        self.console.print(Panel.fit(
            f"[bold cyan]Saddle Flow[/bold cyan] v{__version__}\n{__description__}",
            title="saddle-flow",
        ))

    def _print_config_errors(self, errors: list[str]) -> None:
        self.console.print("[red]✗ 配置无效:[/red]")
        for error in errors:
            self.console.print(f"  [red]-[/red] {escape(error)}", highlight=False)

    def _print_run_summary(self, summary: dict[str, Any], run_dir: Path) -> None:
        table = Table(title=f"运行结果: {summary.get('problem')}")
        table.add_column("指标", style="cyan")
        table.add_column("值", style="yellow")
        for key in (
            "samples",
            "accepted_steps",
            "rejected_steps",
            "final_gap",
            "final_lt_gap",
            "final_dist_min_norm",
            "final_dist_center",
            "fit_gap_slope",
            "predicted_rate_gap",
            "gap_oscillations",
            "thm31_ok",
            "thm42_ok",
            "case",
        ):
            if key in summary:
                table.add_row(key, str(summary[key]))
        self.console.print(table)
        self.console.print(f"[green]✓[/green] 输出目录: {run_dir}")


def main(argv: Optional[list[str]] = None) -> int:
    """CLI 入口"""
    cli = SaddleFlowCLI()
    return cli.run(argv)


if __name__ == "__main__":
    sys.exit(main())
