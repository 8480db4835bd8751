"""Estimator dispatch shared by the experiment runner and the command line."""

from __future__ import annotations

from .baselines import BaselineConfig, brw_fit_grid, cqr_fit_grid, wl1_fit_grid
from .isotonic import isotonize_surface
from .qr import Dataset, GridFit, oqr_fit_grid
from .smooth import TauRule, aqr_fit_grid, tau_default
from .surface import ProbGrid

__all__ = ["METHODS", "fit_method"]

# BK: plain interpolated order-by-order fits (the only one that can cross)
# IOQR: BK isotonized per coefficient
# IAQR: smoothed fits isotonized per coefficient
# CQR / WL1 / BRW: constrained designs, see baselines
METHODS = ("BK", "IOQR", "IAQR", "CQR", "WL1", "BRW")


def fit_method(
    method: str,
    data: Dataset,
    grid: ProbGrid,
    tau=None,
    tau_rule=TauRule.IQR_REGRESSION,
    cfg: BaselineConfig = None,
) -> GridFit:
    """Fit one named estimator and return its surface with statuses.

    tau applies to IAQR only; when omitted it is chosen by ``tau_rule``.
    cfg applies to WL1 and BRW only.
    """
    method = method.upper()
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if cfg is None:
        cfg = BaselineConfig()
    if method == "BK":
        return oqr_fit_grid(data, grid)
    if method == "IOQR":
        fit = oqr_fit_grid(data, grid)
        return GridFit(isotonize_surface(fit.surface), fit.statuses)
    if method == "IAQR":
        if tau is None:
            tau = tau_default(data, tau_rule)
        fit = aqr_fit_grid(data, grid, tau)
        return GridFit(isotonize_surface(fit.surface), fit.statuses)
    if method == "CQR":
        return cqr_fit_grid(data, grid)
    if method == "WL1":
        return wl1_fit_grid(data, grid, cfg)
    return brw_fit_grid(data, grid, cfg)
