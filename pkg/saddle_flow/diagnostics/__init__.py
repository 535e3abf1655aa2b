# -*- coding: utf-8 -*-
"""
Saddle Flow 诊断模块
"""

from .center import (
    CenterBoundRecord,
    CenterError,
    MissingAnchorError,
    TikhonovCenter,
    check_center_bounds,
    tikhonov_center,
    tikhonov_center_velocity,
)
from .hypotheses import (
    CASE_HIGH,
    CASE_LOW,
    CheckStatus,
    HypothesisCheck,
    HypothesisGroup,
    HypothesisReport,
    PredictedRates,
    check_hypotheses,
    predicted_rates,
)
from .observables import (
    CSV_COLUMNS,
    DiagnosticsRow,
    Trajectory,
    analyze,
    delta_diag,
    diagnostics_row,
    energy_E,
    energy_Ehat,
    lt_gap,
    primal_dual_gap,
    residuals,
)
from .rates import (
    RateFit,
    cumulative_integral,
    dyadic_increments,
    dyadic_windows,
    fit_rate,
    head_tail_ratio,
    oscillation_count,
    running_integrals,
    tail_decreasing,
    total_variation,
)

__all__ = [
    "CASE_HIGH",
    "CASE_LOW",
    "CSV_COLUMNS",
    "CenterBoundRecord",
    "CenterError",
    "CheckStatus",
    "DiagnosticsRow",
    "HypothesisCheck",
    "HypothesisGroup",
    "HypothesisReport",
    "MissingAnchorError",
    "PredictedRates",
    "RateFit",
    "TikhonovCenter",
    "Trajectory",
    "analyze",
    "check_center_bounds",
    "check_hypotheses",
    "cumulative_integral",
    "delta_diag",
    "diagnostics_row",
    "dyadic_increments",
    "dyadic_windows",
    "energy_E",
    "energy_Ehat",
    "fit_rate",
    "head_tail_ratio",
    "lt_gap",
    "oscillation_count",
    "predicted_rates",
    "primal_dual_gap",
    "residuals",
    "running_integrals",
    "tail_decreasing",
    "tikhonov_center",
    "tikhonov_center_velocity",
    "total_variation",
]
