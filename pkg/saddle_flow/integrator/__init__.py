# -*- coding: utf-8 -*-
"""
Saddle Flow 积分器模块
"""

from .dopri import (
    IntegrationError,
    IntegrationResult,
    IntegratorConfig,
    SampleGrid,
    integrate,
)

__all__ = [
    "IntegrationError",
    "IntegrationResult",
    "IntegratorConfig",
    "SampleGrid",
    "integrate",
]
