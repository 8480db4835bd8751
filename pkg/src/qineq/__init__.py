"""Conditional quantile-based inequality curves and indices.

Estimates the median-anchored (qZ) and tail-symmetric (qD) inequality
curves of a positive response conditional on covariates, through
log-linear quantile regression on a uniform order grid with several
non-crossing strategies, and integrates them into scalar indices. Ships
an exact oracle model (the exponentiated flattened logistic distribution)
and a Monte Carlo harness comparing the estimators against it.
"""

from .surface import (
    ProbGrid,
    BetaSurface,
    CondQuantile,
    NoncrossReport,
    interp_eval,
    check_noncrossing,
    read_surface_csv,
    write_surface_csv,
)
from .isotonic import IsotonicFit, pava, isotonize_surface
from .qr import (
    Dataset,
    FitStatus,
    FitResult,
    GridFit,
    check_loss,
    check_loss_sum,
    oqr_fit,
    oqr_fit_grid,
)
from .smooth import (
    LossKind,
    SmoothLoss,
    TauRule,
    loss_eval,
    aqr_objective,
    aqr_fit,
    aqr_fit_grid,
    tau_default,
)
from .baselines import BaselineConfig, cqr_fit_grid, wl1_fit_grid, brw_fit_grid
from .inequality import (
    CurveKind,
    CurveSample,
    IndexValue,
    curve_value,
    simpson,
    sample_curve,
    index,
    measure_curve,
    write_curve_csv,
    write_index_csv,
)
from .fld import (
    FldParams,
    InfiniteMomentError,
    SeriesConvergenceError,
    fld_quantile,
    fld_mean_var,
    efld_quantile_fn,
    efld_sample,
    hyp1f1,
    efld_moment,
    efld_true_curve,
    efld_true_index,
    true_beta_surface,
)
from .methods import METHODS, fit_method
from .simulate import (
    SimConfig,
    ErrorRecord,
    MseCell,
    RatioCell,
    SimResult,
    run_experiment,
    aggregate,
    write_outputs,
    load_config,
)

__version__ = "0.1.0"

__all__ = [
    "ProbGrid", "BetaSurface", "CondQuantile", "NoncrossReport",
    "interp_eval", "check_noncrossing", "read_surface_csv", "write_surface_csv",
    "IsotonicFit", "pava", "isotonize_surface",
    "Dataset", "FitStatus", "FitResult", "GridFit",
    "check_loss", "check_loss_sum", "oqr_fit", "oqr_fit_grid",
    "LossKind", "SmoothLoss", "TauRule", "loss_eval",
    "aqr_objective", "aqr_fit", "aqr_fit_grid", "tau_default",
    "BaselineConfig", "cqr_fit_grid", "wl1_fit_grid", "brw_fit_grid",
    "CurveKind", "CurveSample", "IndexValue", "curve_value", "simpson",
    "sample_curve", "index", "measure_curve", "write_curve_csv", "write_index_csv",
    "FldParams", "InfiniteMomentError", "SeriesConvergenceError",
    "fld_quantile", "fld_mean_var", "efld_quantile_fn", "efld_sample",
    "hyp1f1", "efld_moment", "efld_true_curve", "efld_true_index",
    "true_beta_surface",
    "METHODS", "fit_method",
    "SimConfig", "ErrorRecord", "MseCell", "RatioCell", "SimResult",
    "run_experiment", "aggregate", "write_outputs", "load_config",
]
