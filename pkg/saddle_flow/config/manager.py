# -*- coding: utf-8 -*-
"""
功能：配置管理器 - 管理实验配置
作用：读取、合并默认值、验证、持久化 YAML 运行/扫描配置，并构造问题、参数与积分器对象
创建时间：2026-10-19
"""

from __future__ import annotations

import copy
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from ..dynamics.params import DynamicsParams, parameter_violations
from ..integrator.dopri import IntegratorConfig, SampleGrid
from ..problem.builtin import (
    InitialData,
    make_example_51,
    make_quadratic,
    make_random_instance,
    standard_normal_generator,
)
from ..problem.models import ProblemSpec

logger = logging.getLogger(__name__)

PROBLEM_KINDS = ("example51", "example52", "quadratic")
SPACINGS = ("log", "linear")
INITIAL_MODES = ("explicit", "random")
SECTIONS = ("problem", "params", "integrator", "horizon", "initial", "output")

DEFAULT_CONFIG: dict[str, dict[str, Any]] = {
    "problem": {
        "kind": "example51",
        "coefficients": [1.0, 10.0, 10.0, 1.0],
        "m": 20,
        "n": 50,
        "eta": 1.0,
        "seed": 0,
        "f_matrix": None,
        "f_linear": None,
        "g_matrix": None,
        "g_linear": None,
        "coupling": None,
    },
    "params": {
        "alpha": 2.5,
        "q": 0.42,
        "s": 0.005,
        "p": 0.268,
        "c": 10.0,
        "gamma": 0.8,
        "t0": 1.0,
    },
    "integrator": {
        "rel_tol": 1e-6,
        "abs_tol": 1e-9,
        "initial_step": None,
        "max_step": None,
        "max_rhs_evals": 100_000_000,
        "fixed_step": None,
    },
    "horizon": {
        "t_start": None,  # None 表示取 params.t0
        "t_end": 50.0,
        "samples": 200,
        "spacing": "log",
    },
    "initial": {
        "mode": "explicit",
        "x": [1.0, 1.5],
        "y": [1.0, 1.5],
        "vx": [1.0, 1.0],
        "vy": [1.0, 1.0],
        "seed": None,  # random 模式下 None 表示沿用 problem.seed
    },
    "output": {
        "dir": "output",
        "plots": True,
        "workers": 1,
    },
}


class ConfigError(ValueError):
    """配置无效，errors 为全部验证信息"""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


def _default(section: str) -> dict[str, Any]:
    return copy.deepcopy(DEFAULT_CONFIG[section])


def _merge_defaults(data: dict[str, Any]) -> dict[str, dict[str, Any]]:
    merged = copy.deepcopy(DEFAULT_CONFIG)
    for section, values in data.items():
        if section in merged and isinstance(values, dict):
            merged[section].update(values)
        else:
            merged[section] = values
    return merged


@dataclass
class RunConfig:
    """单次运行配置"""

    problem: dict[str, Any] = field(default_factory=lambda: _default("problem"))
    params: dict[str, Any] = field(default_factory=lambda: _default("params"))
    integrator: dict[str, Any] = field(default_factory=lambda: _default("integrator"))
    horizon: dict[str, Any] = field(default_factory=lambda: _default("horizon"))
    initial: dict[str, Any] = field(default_factory=lambda: _default("initial"))
    output: dict[str, Any] = field(default_factory=lambda: _default("output"))

    @classmethod
    def from_dict(cls, data: Optional[dict[str, Any]] = None) -> "RunConfig":
        """合并默认配置后构造；未知顶层段与 sweep 段被忽略"""
        merged = _merge_defaults(data or {})
        return cls(**{section: merged[section] for section in SECTIONS})

    def to_dict(self) -> dict[str, dict[str, Any]]:
        return {section: copy.deepcopy(getattr(self, section)) for section in SECTIONS}

    def get(self, key: str, default: Any = None) -> Any:
        """点号键读取，例如 get("params.gamma")"""
        section, _, name = key.partition(".")
        values = getattr(self, section, None) if section in SECTIONS else None
        if values is None:
            return default
        if not name:
            return values
        return values.get(name, default)

    def with_override(self, key: str, value: Any) -> "RunConfig":
        """返回修改了单个点号键的新配置；不带段名时视为 params 键"""
        section, _, name = key.partition(".") if "." in key else ("params", "", key)
        if section not in SECTIONS:
            raise ConfigError([f"未知配置段: {section}"])
        data = self.to_dict()
        data[section][name] = value
        return RunConfig(**data)

    # ---- 构造领域对象 ----

    def build_params(self) -> DynamicsParams:
        return DynamicsParams(**{k: float(v) for k, v in self.params.items()})

    def build_integrator(self) -> IntegratorConfig:
        values = dict(self.integrator)
        values["max_rhs_evals"] = int(values["max_rhs_evals"])
        return IntegratorConfig(**values)

    @property
    def t_start(self) -> float:
        start = self.horizon.get("t_start")
        return float(self.params["t0"] if start is None else start)

    @property
    def t_end(self) -> float:
        return float(self.horizon["t_end"])

    def build_grid(self) -> SampleGrid:
        builder = SampleGrid.log if self.horizon["spacing"] == "log" else SampleGrid.linear
        return builder(self.t_start, self.t_end, int(self.horizon["samples"]))

    def build_problem(self) -> tuple[ProblemSpec, Optional[InitialData]]:
        """构造问题；随机实例同时返回其抽取的初始数据"""
        spec = self.problem
        kind = spec["kind"]
        if kind == "example51":
            return make_example_51(*[float(c) for c in spec["coefficients"]]), None
        if kind == "example52":
            return make_random_instance(
                int(spec["m"]), int(spec["n"]), int(spec["seed"]), float(spec["eta"])
            )
        if kind == "quadratic":
            problem = make_quadratic(
                np.asarray(spec["f_matrix"], float),
                np.asarray(spec["g_matrix"], float),
                np.asarray(spec["coupling"], float),
                spec.get("f_linear"),
                spec.get("g_linear"),
            )
            return problem, None
        raise ConfigError([f"problem.kind 必须是: {', '.join(PROBLEM_KINDS)}"])

    def build_initial(
        self, problem: ProblemSpec, drawn: Optional[InitialData]
    ) -> InitialData:
        """初始条件：显式向量，或随机（实例自带数据 / 按种子重新抽取）"""
        init = self.initial
        if init["mode"] == "explicit":
            return InitialData(
                x=np.asarray(init["x"], float),
                y=np.asarray(init["y"], float),
                vx=np.asarray(init["vx"], float),
                vy=np.asarray(init["vy"], float),
            )
        if drawn is not None and init.get("seed") is None:
            return drawn
        seed = init.get("seed")
        rng = standard_normal_generator(int(self.problem["seed"] if seed is None else seed))
        n, m = problem.n, problem.m
        return InitialData(
            x=rng.standard_normal(n),
            y=rng.standard_normal(m),
            vx=rng.standard_normal(n),
            vy=rng.standard_normal(m),
        )

    # ---- 验证 ----

    def validate(self) -> tuple[bool, list[str]]:
        """
        验证配置

        Returns:
            (是否有效, 错误列表)
        """
        errors: list[str] = []
        for section in SECTIONS:
            unknown = set(getattr(self, section)) - set(DEFAULT_CONFIG[section])
            for key in sorted(unknown):
                errors.append(f"未知配置项: {section}.{key}")

        problem = self.problem
        if problem["kind"] not in PROBLEM_KINDS:
            errors.append(f"problem.kind 必须是: {', '.join(PROBLEM_KINDS)}")
        if problem["kind"] == "example51" and len(problem.get("coefficients") or []) != 4:
            errors.append("problem.coefficients 必须是 4 个实数 [m, n, j, k]")
        if problem["kind"] == "example52":
            for key in ("m", "n"):
                if not isinstance(problem[key], int) or problem[key] < 1:
                    errors.append(f"problem.{key} 必须是正整数")
            if not isinstance(problem["eta"], (int, float)) or not problem["eta"] > 0:
                errors.append("problem.eta 必须为正")
        if not isinstance(problem["seed"], int) or problem["seed"] < 0:
            errors.append("problem.seed 必须是非负整数")
        if problem["kind"] == "quadratic":
            for key in ("f_matrix", "g_matrix", "coupling"):
                if problem.get(key) is None:
                    errors.append(f"problem.{key} 在 quadratic 问题中必须给出")

        try:
            values = {k: float(self.params[k]) for k in DEFAULT_CONFIG["params"]}
        except (TypeError, ValueError):
            errors.append("params 中的值必须是实数")
        else:
            for invariant, message in parameter_violations(**values):
                errors.append(f"params 违反 {invariant}: {message}")

        try:
            errors.extend(f"integrator.{e}" for e in self.build_integrator().validate())
        except (TypeError, ValueError) as exc:
            errors.append(f"integrator 配置无效: {exc}")

        horizon = self.horizon
        if horizon["spacing"] not in SPACINGS:
            errors.append(f"horizon.spacing 必须是: {', '.join(SPACINGS)}")
        if not isinstance(horizon["samples"], int) or horizon["samples"] < 1:
            errors.append("horizon.samples 必须是正整数")
        try:
            if self.t_start < float(self.params["t0"]):
                errors.append(f"horizon.t_start={self.t_start} 不能小于 t0={self.params['t0']}")
            if self.t_end < self.t_start:
                errors.append(f"horizon.t_end={self.t_end} 不能小于 t_start={self.t_start}")
        except (TypeError, ValueError):
            errors.append("horizon.t_start / t_end 必须是实数")

        if self.initial["mode"] not in INITIAL_MODES:
            errors.append(f"initial.mode 必须是: {', '.join(INITIAL_MODES)}")
        workers = self.output.get("workers")
        if not isinstance(workers, int) or workers < 1:
            errors.append("output.workers 必须是正整数")

        if not errors:
            errors.extend(self._validate_instance())
        return len(errors) == 0, errors

    def _validate_instance(self) -> list[str]:
        try:
            problem, drawn = self.build_problem()
            initial = self.build_initial(problem, drawn)
        except (TypeError, ValueError) as exc:
            return [f"问题构造失败: {exc}"]
        errors = []
        for label, vec, dim in (
            ("x", initial.x, problem.n),
            ("y", initial.y, problem.m),
            ("vx", initial.vx, problem.n),
            ("vy", initial.vy, problem.m),
        ):
            if np.shape(vec) != (dim,):
                errors.append(f"initial.{label} 长度应为 {dim}, 实际 {np.shape(vec)}")
            elif not np.all(np.isfinite(vec)):
                errors.append(f"initial.{label} 含非有限值")
        return errors

    def ensure_valid(self) -> None:
        ok, errors = self.validate()
        if not ok:
            raise ConfigError(errors)


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


@dataclass
class SweepPoint:
    """扫描网格上的一个点"""

    label: str
    overrides: dict[str, Any]
    config: RunConfig


@dataclass
class SweepConfig:
    """参数扫描配置：一个或两个轴的显式取值列表"""

    base: RunConfig
    axes: dict[str, list[Any]] = field(default_factory=dict)

    def points(self) -> list[SweepPoint]:
        """笛卡尔积网格点，按轴声明顺序展开"""
        names = list(self.axes)
        points = []
        for combo in itertools.product(*(self.axes[name] for name in names)):
            overrides = dict(zip(names, combo))
            config = self.base
            for key, value in overrides.items():
                config = config.with_override(key, value)
            label = ",".join(f"{key}={_format_value(value)}" for key, value in overrides.items())
            points.append(SweepPoint(label=label or "base", overrides=overrides, config=config))
        return points

    def validate(self) -> tuple[bool, list[str]]:
        errors = []
        if not 1 <= len(self.axes) <= 2:
            errors.append(f"sweep 必须包含 1 或 2 个轴, 实际 {len(self.axes)}")
        for name, values in self.axes.items():
            if not isinstance(values, list) or not values:
                errors.append(f"sweep.{name} 必须是非空取值列表")
        if errors:
            return False, errors
        for point in self.points():
            ok, point_errors = point.config.validate()
            errors.extend(f"[{point.label}] {e}" for e in point_errors)
        return len(errors) == 0, errors


class ConfigManager:
    """配置管理器"""

    CONFIG_FILENAME = "saddle-flow.yaml"

    def __init__(self, config_path: Optional[Path] = None):
        """
        初始化配置管理器

        Args:
            config_path: 配置文件路径，默认为当前目录下的 saddle-flow.yaml
        """
        self.config_path = Path(config_path) if config_path else Path.cwd() / self.CONFIG_FILENAME
        self._data: Optional[dict[str, Any]] = None

    def exists(self) -> bool:
        """检查配置文件是否存在"""
        return self.config_path.exists()

    def _read(self) -> dict[str, Any]:
        if self._data is None:
            if not self.exists():
                self._data = {}
            else:
                try:
                    with open(self.config_path, "r", encoding="utf-8") as f:
                        data = yaml.safe_load(f) or {}
                except yaml.YAMLError as exc:
                    raise ConfigError([f"YAML 解析失败: {exc}"]) from exc
                if not isinstance(data, dict):
                    raise ConfigError(["配置文件顶层必须是映射"])
                self._data = data
        return self._data

    def load(self) -> RunConfig:
        """
        加载运行配置

        Returns:
            RunConfig: 与默认配置合并后的运行配置
        """
        data = {k: v for k, v in self._read().items() if k != "sweep"}
        unknown = set(data) - set(SECTIONS)
        if unknown:
            raise ConfigError([f"未知配置段: {name}" for name in sorted(unknown)])
        return RunConfig.from_dict(data)

    def load_sweep(self) -> SweepConfig:
        """加载扫描配置（sweep 段 + 基础运行配置）"""
        axes = self._read().get("sweep") or {}
        if not isinstance(axes, dict):
            raise ConfigError(["sweep 段必须是 参数名: [取值...] 的映射"])
        return SweepConfig(base=self.load(), axes=dict(axes))

    def save(self, config: RunConfig, sweep: Optional[dict[str, list[Any]]] = None) -> None:
        """
        保存配置文件

        Args:
            config: 要保存的运行配置
            sweep: 可选的扫描轴
        """
        data: dict[str, Any] = config.to_dict()
        if sweep:
            data["sweep"] = sweep
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.config_path, "w", encoding="utf-8") as f:
            yaml.safe_dump(data, f, allow_unicode=True, default_flow_style=False, sort_keys=False)
        self._data = data

    def create(self, **overrides: Any) -> RunConfig:
        """
        以默认配置创建新配置文件

        Args:
            **overrides: 点号键覆盖，例如 {"params.gamma": 0}
        """
        config = RunConfig()
        for key, value in overrides.items():
            config = config.with_override(key, value)
        self.save(config)
        return config

    def get(self, key: str, default: Any = None) -> Any:
        """
        获取配置值

        Args:
            key: 配置键（支持点号分隔的嵌套键）
            default: 默认值
        """
        return self.load().get(key, default)

    def validate(self) -> tuple[bool, list[str]]:
        """
        验证配置文件

        Returns:
            (是否有效, 错误列表)
        """
        try:
            if "sweep" in self._read():
                return self.load_sweep().validate()
            return self.load().validate()
        except ConfigError as exc:
            return False, exc.errors


def apply_overrides(
    config: RunConfig,
    out: Optional[str] = None,
    seed: Optional[int] = None,
    rel_tol: Optional[float] = None,
    abs_tol: Optional[float] = None,
) -> RunConfig:
    """把命令行全局选项应用到运行配置"""
    if out is not None:
        config = config.with_override("output.dir", out)
    if seed is not None:
        config = config.with_override("problem.seed", seed)
        if config.initial.get("seed") is not None:
            config = config.with_override("initial.seed", seed)
    if rel_tol is not None:
        config = config.with_override("integrator.rel_tol", rel_tol)
    if abs_tol is not None:
        config = config.with_override("integrator.abs_tol", abs_tol)
    return config


# 全局配置管理器实例
_global_config_manager: Optional[ConfigManager] = None


def get_config_manager(config_path: Optional[Path] = None) -> ConfigManager:
    """
    获取全局配置管理器实例；传入不同路径时重新创建

    Args:
        config_path: 配置文件路径
    """
    global _global_config_manager
    if _global_config_manager is None or (
        config_path is not None and Path(config_path) != _global_config_manager.config_path
    ):
        _global_config_manager = ConfigManager(config_path)
    return _global_config_manager
