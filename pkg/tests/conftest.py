# -*- coding: utf-8 -*-
"""
Saddle Flow 测试配置
"""

import shutil
import tempfile
from pathlib import Path
from typing import Generator

import numpy as np
import pytest

from saddle_flow.dynamics import DynamicsParams, State
from saddle_flow.problem import InitialData, ProblemSpec, make_example_51, make_random_instance


@pytest.fixture(autouse=True)
def reset_global_config_manager():
    """重置全局配置管理器（每个测试前）"""
    from saddle_flow.config import manager
    manager._global_config_manager = None
    yield
    manager._global_config_manager = None


@pytest.fixture
def temp_project_dir() -> Generator[Path, None, None]:
    """临时项目目录"""
    temp_dir = Path(tempfile.mkdtemp())
    yield temp_dir
    shutil.rmtree(temp_dir, ignore_errors=True)


@pytest.fixture
def example51() -> ProblemSpec:
    """秩一耦合示例 (1, 10, 10, 1)"""
    return make_example_51(1, 10, 10, 1)


@pytest.fixture
def small_random() -> tuple[ProblemSpec, InitialData]:
    """小规模随机最小二乘实例"""
    return make_random_instance(4, 6, seed=7)


@pytest.fixture
def rank_one_params() -> DynamicsParams:
    """秩一示例使用的参数"""
    return DynamicsParams(alpha=2.5, q=0.42, s=0.005, p=0.268, c=10.0, gamma=0.8, t0=1.0)


@pytest.fixture
def least_squares_params() -> DynamicsParams:
    """最小二乘示例使用的参数"""
    return DynamicsParams(alpha=3.0, q=0.6, s=0.4, p=2.3, c=5.0, gamma=0.8, t0=1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    """测试用随机数发生器"""
    return np.random.default_rng(12345)


def random_state(problem: ProblemSpec, t: float, rng: np.random.Generator) -> State:
    """随机状态"""
    return State(
        t=t,
        x=rng.standard_normal(problem.n),
        y=rng.standard_normal(problem.m),
        vx=rng.standard_normal(problem.n),
        vy=rng.standard_normal(problem.m),
    )


@pytest.fixture
def make_state(rng: np.random.Generator):
    """随机状态构造器"""
    def _make(problem: ProblemSpec, t: float) -> State:
        return random_state(problem, t, rng)
    return _make
