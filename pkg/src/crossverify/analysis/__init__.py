from .bootstrap import (
    BootstrapError,
    NonConvergent,
    VarianceCurve,
    ZeroVariance,
    bootstrap_estimates,
    bootstrap_variance,
    fit_power_law,
    repetitions_for_variance,
    subsample_grid,
    variance_curve,
)
from .budget import SOURCES, DegenerateBudget, ErrorBudget, error_budget
from .scaling import ScalingPoint, bracketing_grid, measurements_per_repetition, scaling_fit, scaling_point
from .tables import BUDGET_COLUMNS, SCALING_COLUMNS, VARIANCE_COLUMNS, read_table, render_table
