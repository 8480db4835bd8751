"""Check-loss quantile regression solved as a linear program.

The order-p regression of z on X minimizes sum_i rho_p(z_i - x_i' beta)
with rho_p(u) = u (p - 1{u < 0}). Splitting residuals into positive and
negative parts u+ and u- gives the standard LP

    min  p 1'u+ + (1-p) 1'u-   s.t.  X beta + u+ - u- = z,  u+, u- >= 0,

solved here with HiGHS at tight feasibility tolerances. Grid fits solve
one LP per knot and stack the coefficient rows into a surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .surface import BetaSurface, ProbGrid

__all__ = [
    "Dataset",
    "FitStatus",
    "FitResult",
    "GridFit",
    "check_loss",
    "check_loss_sum",
    "oqr_fit",
    "oqr_fit_grid",
]

_LP_OPTIONS = {
    "presolve": True,
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
}


class FitStatus(Enum):
    OPTIMAL = "optimal"
    MAX_ITERATIONS = "max_iterations"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Dataset:
    """Design matrix with intercept column and log-scale responses.

    X has shape (n, d+1) with column 0 identically one; z has shape (n,).
    Requires n >= d + 2 so every order-p fit is determined.
    """

    X: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        z = np.asarray(self.z, dtype=float)
        if X.ndim != 2 or z.ndim != 1 or X.shape[0] != z.shape[0]:
            raise ValueError("X must be (n, d+1) and z (n,) with matching n")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(z))):
            raise ValueError("X and z must be finite")
        if not np.all(X[:, 0] == 1.0):
            raise ValueError("X[:, 0] must be an intercept column of ones")
        if X.shape[0] < X.shape[1] + 1:
            raise ValueError(
                f"need n >= d + 2 observations, got n={X.shape[0]} for d={X.shape[1] - 1}"
            )
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1] - 1

    @classmethod
    def from_covariates(cls, x, z) -> "Dataset":
        """Build the design from raw covariates (shape (n,) or (n, d)) and z."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        z = np.asarray(z, dtype=float)
        X = np.column_stack([np.ones(x.shape[0]), x])
        return cls(X, z)

    @classmethod
    def from_xy(cls, x, y) -> "Dataset":
        """Build the design from covariates and a positive response, z = log y."""
        y = np.asarray(y, dtype=float)
        if np.any(~(y > 0)):
            bad = np.nonzero(~(y > 0))[0]
            raise ValueError(f"response must be strictly positive; offending rows {bad.tolist()}")
        return cls.from_covariates(x, np.log(y))

    def mean_covariates(self) -> np.ndarray:
        """Column means of the raw covariates (without the intercept)."""
        return self.X[:, 1:].mean(axis=0)


@dataclass(frozen=True)
class FitResult:
    """Single-order fit: coefficients, check-loss objective, solver status.

    ``objective`` is always sum_i rho_p(z_i - x_i' beta) at the returned
    beta, for LP and smoothed fits alike. Smoothed fits additionally report
    their smooth objective value and final gradient norm.
    """

    beta: np.ndarray
    objective: float
    status: FitStatus
    p: float
    iterations: int = 0
    smooth_objective: float | None = None
    grad_norm: float | None = None


@dataclass(frozen=True)
class GridFit:
    """A surface plus the per-knot solver statuses that produced it."""

    surface: BetaSurface
    statuses: tuple

    @property
    def ok(self) -> bool:
        return all(s == FitStatus.OPTIMAL for s in self.statuses)


def check_loss(u, p):
    """rho_p(u) = u (p - 1{u < 0}), elementwise."""
    _validate_order(p)
    u = np.asarray(u, dtype=float)
    return u * (p - (u < 0))


def check_loss_sum(data: Dataset, beta, p) -> float:
    """Total check loss of the residuals z - X beta at order p."""
    beta = np.asarray(beta, dtype=float)
    return float(np.sum(check_loss(data.z - data.X @ beta, p)))


def _validate_order(p):
    if not (0.0 < p < 1.0):
        raise ValueError(f"quantile order must lie in (0, 1), got {p}")


def _solve_qr_lp(X, z, p, A_beta=None, b_ub=None):
    """Solve one order-p regression LP, optionally with rows A_beta @ beta <= b_ub.

    Returns (beta, status, iterations). On solver failure without an
    iterate, falls back to least squares with DEGENERATE status.
    """
    n, k = X.shape
    c = np.concatenate([np.zeros(k), np.full(n, p), np.full(n, 1.0 - p)])
    eye = sparse.identity(n, format="csc")
    A_eq = sparse.hstack([sparse.csc_matrix(X), eye, -eye], format="csc")
    bounds = [(None, None)] * k + [(0, None)] * (2 * n)
    A_ub = None
    if A_beta is not None:
        A_beta = np.atleast_2d(np.asarray(A_beta, dtype=float))
        A_ub = sparse.hstack(
            [sparse.csc_matrix(A_beta), sparse.csc_matrix((A_beta.shape[0], 2 * n))],
            format="csc",
        )
        b_ub = np.asarray(b_ub, dtype=float)
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=z,
        bounds=bounds,
        method="highs",
        options=_LP_OPTIONS,
    )
    iters = int(getattr(res, "nit", 0) or 0)
    if res.status == 0:
        return res.x[:k].copy(), FitStatus.OPTIMAL, iters
    if res.status == 1 and res.x is not None:
        return res.x[:k].copy(), FitStatus.MAX_ITERATIONS, iters
    if res.x is not None:
        return res.x[:k].copy(), FitStatus.DEGENERATE, iters
    beta, *_ = np.linalg.lstsq(X, z, rcond=None)
    return beta, FitStatus.DEGENERATE, iters


def oqr_fit(data: Dataset, p) -> FitResult:
    """Order-p check-loss regression.

    With no covariates the minimizer is a sample p-quantile of z.
    """
    _validate_order(p)
    beta, status, iters = _solve_qr_lp(data.X, data.z, p)
    return FitResult(
        beta=beta,
        objective=check_loss_sum(data, beta, p),
        status=status,
        p=float(p),
        iterations=iters,
    )


def oqr_fit_grid(data: Dataset, grid: ProbGrid) -> GridFit:
    """Independent order-p fits at every knot, stacked into a surface.

    Individual knot failures are recorded in the status tuple; the surface
    is still returned.
    """
    rows = []
    statuses = []
    for p in grid.knots:
        fit = oqr_fit(data, p)
        rows.append(fit.beta)
        statuses.append(fit.status)
    return GridFit(BetaSurface(grid, np.vstack(rows)), tuple(statuses))
