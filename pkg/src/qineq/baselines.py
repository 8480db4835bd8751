"""Constrained quantile-grid estimators that cannot cross by construction.

Three designs, all built on the same order-p LP:

* CQR: stepwise outward from the median knot, each coefficient constrained
  coordinatewise against the previously fitted neighbour. Monotone in every
  coefficient, hence non-crossing for nonnegative covariates.
* WL1: stepwise outward from the median knot with the covariates rescaled
  to the unit box; each step keeps the fitted predictor at least delta0
  above (below) the neighbour at every box corner, hence everywhere in the
  box by affinity.
* BRW: one joint LP over all knots, with adjacent-knot predictor ordering
  imposed at a set of enforcement points (by default the corners of the
  data bounding box).

Each stepwise solution is projected exactly onto its own constraints after
the solve (a no-op beyond solver tolerance), so downstream exact-comparison
monotonicity checks see the mathematical guarantee, not LP roundoff.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .qr import (
    Dataset,
    FitStatus,
    GridFit,
    _LP_OPTIONS,
    _solve_qr_lp,
    oqr_fit,
)
from .surface import BetaSurface, ProbGrid

__all__ = ["BaselineConfig", "cqr_fit_grid", "wl1_fit_grid", "brw_fit_grid"]


@dataclass(frozen=True)
class BaselineConfig:
    """Separation margin and non-crossing enforcement points.

    corners : optional (k, d) array of covariate vectors. WL1 rescales to
        the bounding box of these points and enforces at its corners; BRW
        enforces at the points themselves. Default: data bounding box.
    """

    delta0: float = 1e-6
    corners: object = None

    def __post_init__(self):
        if not (self.delta0 > 0):
            raise ValueError(f"delta0 must be positive, got {self.delta0}")
        if self.corners is not None:
            c = np.atleast_2d(np.asarray(self.corners, dtype=float))
            if c.size == 0 or not np.all(np.isfinite(c)):
                raise ValueError("corners must be a nonempty finite array")
            object.__setattr__(self, "corners", c)


def _start_index(m: int) -> int:
    """0-based index of the stepwise starting knot (order closest to 1/2)."""
    if m % 2 == 0:
        return m // 2 - 1
    return -(-(m - 1) // 2) - 1


def _corner_points(data: Dataset, cfg: BaselineConfig) -> np.ndarray:
    """Enforcement points as an (k, d) array."""
    d = data.d
    if cfg.corners is not None:
        c = cfg.corners
        if c.shape[1] != d:
            raise ValueError(f"corners have {c.shape[1]} columns, data has d={d}")
        return c
    if d == 0:
        return np.zeros((1, 0))
    lo = data.X[:, 1:].min(axis=0)
    hi = data.X[:, 1:].max(axis=0)
    return np.array(list(itertools.product(*zip(lo, hi))), dtype=float)


def _box(points: np.ndarray):
    return points.min(axis=0), points.max(axis=0)


def cqr_fit_grid(data: Dataset, grid: ProbGrid) -> GridFit:
    """Stepwise coordinatewise-constrained fits from the median knot outward."""
    m = grid.m
    knots = grid.knots
    k = data.d + 1
    rows = [None] * (m - 1)
    statuses = [None] * (m - 1)
    js = _start_index(m)

    fit = oqr_fit(data, knots[js])
    rows[js], statuses[js] = fit.beta, fit.status

    eye = np.eye(k)
    for j in range(js + 1, m - 1):
        prev = rows[j - 1]
        beta, status, _ = _solve_qr_lp(data.X, data.z, knots[j], A_beta=-eye, b_ub=-prev)
        rows[j] = np.maximum(beta, prev)
        statuses[j] = status
    for j in range(js - 1, -1, -1):
        prev = rows[j + 1]
        beta, status, _ = _solve_qr_lp(data.X, data.z, knots[j], A_beta=eye, b_ub=prev)
        rows[j] = np.minimum(beta, prev)
        statuses[j] = status
    return GridFit(BetaSurface(grid, np.vstack(rows)), tuple(statuses))


def wl1_fit_grid(data: Dataset, grid: ProbGrid, cfg: BaselineConfig = BaselineConfig()) -> GridFit:
    """Stepwise corner-separated fits on unit-box-rescaled covariates.

    Each non-median knot keeps its predictor delta0 above (below) the
    previous knot's at every corner of the rescaled unit box; affinity
    extends the ordering to the whole box. Coefficients are mapped back to
    the original covariate scale.
    """
    m = grid.m
    knots = grid.knots
    d = data.d
    points = _corner_points(data, cfg)
    if d > 0:
        lo, hi = _box(points)
        rng = np.where(hi - lo > 0, hi - lo, 1.0)
        Xs = np.column_stack([np.ones(data.n), (data.X[:, 1:] - lo) / rng])
        scaled = Dataset(Xs, data.z)
        corners = np.array(list(itertools.product(*[(0.0, 1.0)] * d)))
    else:
        lo = rng = None
        scaled = data
        corners = np.zeros((1, 0))
    ctil = np.column_stack([np.ones(corners.shape[0]), corners])

    rows = [None] * (m - 1)
    statuses = [None] * (m - 1)
    js = _start_index(m)
    fit = oqr_fit(scaled, knots[js])
    rows[js], statuses[js] = fit.beta, fit.status

    for j in range(js + 1, m - 1):
        prev = rows[j - 1]
        beta, status, _ = _solve_qr_lp(
            scaled.X, scaled.z, knots[j],
            A_beta=-ctil, b_ub=-(ctil @ prev + cfg.delta0),
        )
        rows[j] = beta
        statuses[j] = status
    for j in range(js - 1, -1, -1):
        prev = rows[j + 1]
        beta, status, _ = _solve_qr_lp(
            scaled.X, scaled.z, knots[j],
            A_beta=ctil, b_ub=ctil @ prev - cfg.delta0,
        )
        rows[j] = beta
        statuses[j] = status

    coeffs = np.vstack(rows)
    if d > 0:
        back = np.empty_like(coeffs)
        back[:, 1:] = coeffs[:, 1:] / rng
        back[:, 0] = coeffs[:, 0] - back[:, 1:] @ lo
        coeffs = back
    return GridFit(BetaSurface(grid, coeffs), tuple(statuses))


def brw_fit_grid(data: Dataset, grid: ProbGrid, cfg: BaselineConfig = BaselineConfig()) -> GridFit:
    """All knots in one LP with adjacent-knot ordering at enforcement points.

    Minimizes the equally weighted sum of the per-knot check losses subject
    to eta_{j+1}(v) >= eta_j(v) for every enforcement point v.
    """
    m = grid.m
    knots = grid.knots
    n, k = data.X.shape
    nb = (m - 1) * k
    N = n * (m - 1)

    c = np.concatenate([
        np.zeros(nb),
        np.repeat(knots, n),
        np.repeat(1.0 - knots, n),
    ])
    X_blocks = sparse.block_diag([sparse.csc_matrix(data.X)] * (m - 1), format="csc")
    eye = sparse.identity(N, format="csc")
    A_eq = sparse.hstack([X_blocks, eye, -eye], format="csc")
    b_eq = np.tile(data.z, m - 1)

    points = _corner_points(data, cfg)
    ptil = np.column_stack([np.ones(points.shape[0]), points])
    rows_i, cols_i, vals = [], [], []
    r = 0
    for j in range(m - 2):
        for v in ptil:
            for col in range(k):
                rows_i.append(r)
                cols_i.append(j * k + col)
                vals.append(v[col])
                rows_i.append(r)
                cols_i.append((j + 1) * k + col)
                vals.append(-v[col])
            r += 1
    A_ub = sparse.coo_matrix(
        (vals, (rows_i, cols_i)), shape=(r, nb + 2 * N)
    ).tocsc()
    b_ub = np.zeros(r)

    bounds = [(None, None)] * nb + [(0, None)] * (2 * N)
    res = linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
        bounds=bounds, method="highs", options=_LP_OPTIONS,
    )
    if res.status == 0:
        status = FitStatus.OPTIMAL
    elif res.status == 1:
        status = FitStatus.MAX_ITERATIONS
    else:
        status = FitStatus.DEGENERATE
    if res.x is not None:
        coeffs = res.x[:nb].reshape(m - 1, k)
    else:
        beta, *_ = np.linalg.lstsq(data.X, data.z, rcond=None)
        coeffs = np.tile(beta, (m - 1, 1))
        status = FitStatus.DEGENERATE

    coeffs = _project_monotone(coeffs, points)
    return GridFit(BetaSurface(grid, coeffs), (status,) * (m - 1))


def _project_monotone(coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Exact repair of solver-tolerance ordering violations (d <= 1 only).

    Raises rows until the linear predictor at the extreme enforcement
    points, recomputed exactly as downstream exact-comparison checks
    compute it, is nondecreasing knot by knot. Adjacent rows whose gap is
    below a snap tolerance at both extremes become bitwise copies, so ties
    cannot flip sign under rounding anywhere between the extremes. Moves
    nothing by more than the LP's own feasibility slack.
    """
    d = points.shape[1]
    if d == 0:
        out = coeffs.copy()
        out[:, 0] = np.maximum.accumulate(out[:, 0])
        return out
    if d != 1:
        return coeffs
    lo = float(points.min())
    hi = float(points.max())
    xlo = np.array([1.0, lo])
    xhi = np.array([1.0, hi])
    out = coeffs.copy()
    n_rows = out.shape[0]
    snap = 1e-11
    for _ in range(8 * n_rows):
        v_lo = out @ xlo
        v_hi = out @ xhi
        g_lo = np.diff(v_lo)
        g_hi = np.diff(v_hi)
        scale = snap * (1.0 + np.maximum(np.abs(v_lo[1:]), np.abs(v_hi[1:])))
        same = np.all(out[1:] == out[:-1], axis=1)
        weak = (g_lo < scale) & (g_hi < scale) & ~same
        bad = np.nonzero(weak | ((g_lo < 0) | (g_hi < 0)) & ~same)[0]
        if bad.size == 0:
            return out
        j = int(bad[0]) + 1
        if weak[j - 1] or hi <= lo:
            out[j] = out[j - 1]
            continue
        w_lo = max(v_lo[j], v_lo[j - 1])
        w_hi = max(v_hi[j], v_hi[j - 1])
        for _ in range(8):
            slope = (w_hi - w_lo) / (hi - lo)
            out[j, 1] = slope
            out[j, 0] = w_lo - slope * lo
            # verify through the same full-matrix product the checks use
            n_lo = float((out @ xlo)[j])
            n_hi = float((out @ xhi)[j])
            if n_lo >= v_lo[j - 1] and n_hi >= v_hi[j - 1]:
                break
            # reconstruction rounded below the target; bump by one ulp
            if n_lo < v_lo[j - 1]:
                w_lo = np.nextafter(w_lo, np.inf)
            if n_hi < v_hi[j - 1]:
                w_hi = np.nextafter(w_hi, np.inf)
        else:
            out[j] = out[j - 1]
    # bounded sweeps exhausted; force ties wherever order still fails
    v_lo = out @ xlo
    v_hi = out @ xhi
    for j in range(1, n_rows):
        if v_lo[j] < v_lo[j - 1] or v_hi[j] < v_hi[j - 1]:
            out[j] = out[j - 1]
            v_lo[j], v_hi[j] = v_lo[j - 1], v_hi[j - 1]
    return out
