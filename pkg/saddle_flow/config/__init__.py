# -*- coding: utf-8 -*-
"""
Saddle Flow Configuration Module
"""

from .manager import (
    DEFAULT_CONFIG,
    ConfigError,
    ConfigManager,
    RunConfig,
    SweepConfig,
    SweepPoint,
    apply_overrides,
    get_config_manager,
)

__all__ = [
    "DEFAULT_CONFIG",
    "ConfigError",
    "ConfigManager",
    "RunConfig",
    "SweepConfig",
    "SweepPoint",
    "apply_overrides",
    "get_config_manager",
]
