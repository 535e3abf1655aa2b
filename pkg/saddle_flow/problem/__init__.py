# -*- coding: utf-8 -*-
"""
Saddle Flow 鞍点问题模块
"""

from .builtin import (
    InitialData,
    make_example_51,
    make_example_52,
    make_quadratic,
    make_random_instance,
    standard_normal_generator,
)
from .models import (
    DimensionError,
    LinearCoupling,
    MatrixCoupling,
    ProblemSpec,
    QuadraticFn,
    SmoothConvexFn,
    coupling_gram,
    coupling_matrix,
    dense_hessian,
)

__all__ = [
    "DimensionError",
    "InitialData",
    "LinearCoupling",
    "MatrixCoupling",
    "ProblemSpec",
    "QuadraticFn",
    "SmoothConvexFn",
    "coupling_gram",
    "coupling_matrix",
    "dense_hessian",
    "make_example_51",
    "make_example_52",
    "make_quadratic",
    "make_random_instance",
    "standard_normal_generator",
]
