# -*- coding: utf-8 -*-
"""
Saddle Flow 动力系统模块
"""

from .params import DynamicsParams, ParameterError, State, parameter_violations
from .system import (
    DomainError,
    DynamicsError,
    accelerations,
    aug_lagrangian,
    check_time,
    extrapolated_gradients,
    forces,
    grad_x_Lt,
    grad_y_Lt,
    make_rhs,
    mass_matrix,
    phase_rhs,
    theta,
    theta_dot,
    theta_numerator,
    theta_pair,
    tikhonov_weight,
)

__all__ = [
    "DomainError",
    "DynamicsError",
    "DynamicsParams",
    "ParameterError",
    "State",
    "accelerations",
    "aug_lagrangian",
    "check_time",
    "extrapolated_gradients",
    "forces",
    "grad_x_Lt",
    "grad_y_Lt",
    "make_rhs",
    "mass_matrix",
    "parameter_violations",
    "phase_rhs",
    "theta",
    "theta_dot",
    "theta_numerator",
    "theta_pair",
    "tikhonov_weight",
]
