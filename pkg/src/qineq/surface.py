"""Piecewise-linear quantile-coefficient surfaces on a uniform order grid.

A fitted model is stored as a matrix of regression coefficients sampled at
the interior orders p_j = j/m, j = 1..m-1, and evaluated in between by
linear interpolation. Conditioning on a covariate vector x collapses the
surface to a single quantile function Q_x(p) = exp(eta_x(p)) with
eta_x(p) = beta0(p) + sum_i beta_i(p) x_i. Below the first knot the
quantile function is continued linearly from (0, 0) to (p_1, Q_x(p_1));
above the last knot it is not extrapolated at all.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ProbGrid",
    "BetaSurface",
    "CondQuantile",
    "NoncrossReport",
    "interp_eval",
    "check_noncrossing",
    "read_surface_csv",
    "write_surface_csv",
]


def interp_eval(knots, values, p):
    """Linear interpolation of (knots, values) at order p, no extrapolation.

    Parameters
    ----------
    knots : array_like
        Strictly increasing interpolation abscissae.
    values : array_like
        Ordinates, same length as ``knots``.
    p : float or array_like
        Evaluation point(s); must lie inside [knots[0], knots[-1]].
    """
    knots = np.asarray(knots, dtype=float)
    values = np.asarray(values, dtype=float)
    if knots.ndim != 1 or knots.shape != values.shape:
        raise ValueError("knots and values must be 1-d arrays of equal length")
    if knots.size < 2:
        raise ValueError("need at least two knots")
    if np.any(np.diff(knots) <= 0):
        raise ValueError("knots must be strictly increasing")
    parr = np.asarray(p, dtype=float)
    if np.any(parr < knots[0]) or np.any(parr > knots[-1]):
        raise ValueError(
            f"order {p} outside interpolation range [{knots[0]}, {knots[-1]}]"
        )
    out = np.interp(parr, knots, values)
    return float(out) if np.isscalar(p) or parr.ndim == 0 else out


@dataclass(frozen=True)
class ProbGrid:
    """Uniform grid of interior quantile orders j/m, j = 1..m-1."""

    m: int
    knots: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = self.m
        if int(m) != m or m < 4:
            raise ValueError(f"grid resolution m must be an integer >= 4, got {m}")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "knots", np.arange(1, self.m) / self.m)

    @property
    def n_knots(self) -> int:
        return self.m - 1

    @property
    def p_lo(self) -> float:
        """First interior order 1/m."""
        return self.knots[0]

    @property
    def p_hi(self) -> float:
        """Last interior order (m-1)/m."""
        return self.knots[-1]


@dataclass(frozen=True)
class BetaSurface:
    """Coefficient functions sampled at the knots of a ProbGrid.

    ``coeffs`` has shape (m-1, d+1): row j holds the coefficient vector at
    order (j+1)/m, column 0 is the intercept.
    """

    grid: ProbGrid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 2:
            raise ValueError("coeffs must be a 2-d array")
        if coeffs.shape[0] != self.grid.n_knots:
            raise ValueError(
                f"coeffs has {coeffs.shape[0]} rows, grid has {self.grid.n_knots} knots"
            )
        if coeffs.shape[1] < 1:
            raise ValueError("coeffs needs at least the intercept column")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coeffs must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def d(self) -> int:
        """Number of covariates (columns minus the intercept)."""
        return self.coeffs.shape[1] - 1

    def beta_at(self, p):
        """Coefficient vector at order p, linearly interpolated between knots.

        p must lie in [1/m, (m-1)/m]. Returns shape (d+1,) for scalar p and
        (len(p), d+1) for array p.
        """
        knots = self.grid.knots
        parr = np.asarray(p, dtype=float)
        if np.any(parr < knots[0]) or np.any(parr > knots[-1]):
            raise ValueError(
                f"order {p} outside knot range [{knots[0]}, {knots[-1]}]"
            )
        cols = [np.interp(parr, knots, self.coeffs[:, k])
                for k in range(self.coeffs.shape[1])]
        out = np.stack(cols, axis=-1)
        return out

    def conditional(self, x) -> "CondQuantile":
        return CondQuantile(self, x)


class CondQuantile:
    """Conditional quantile function Q_x(p) = exp(eta_x(p)) of one surface.

    The linear predictor eta_x is piecewise linear on [1/m, (m-1)/m];
    on [0, 1/m] the quantile itself is interpolated linearly between
    Q_x(0) = 0 and Q_x(1/m). Orders above (m-1)/m are out of domain.
    """

    def __init__(self, surface: BetaSurface, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.ndim != 1 or x.size != surface.d:
            raise ValueError(f"x must have {surface.d} entries, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("x must be finite")
        self.surface = surface
        self.x = x
        xt = np.concatenate(([1.0], x))
        # linear predictor at the knots; interpolating it equals
        # interpolating each coefficient and then taking the dot product
        self.eta_knots = surface.coeffs @ xt

    @property
    def grid(self) -> ProbGrid:
        return self.surface.grid

    def linear_predictor(self, p):
        """eta_x(p) for p in [1/m, (m-1)/m]."""
        g = self.grid
        parr = np.asarray(p, dtype=float)
        if np.any(parr < g.p_lo) or np.any(parr > g.p_hi):
            raise ValueError(f"order {p} outside knot range [{g.p_lo}, {g.p_hi}]")
        out = np.interp(parr, g.knots, self.eta_knots)
        return float(out) if np.isscalar(p) or parr.ndim == 0 else out

    def left_tail(self, p):
        """Linear continuation on [0, 1/m] between (0, 0) and (1/m, Q(1/m))."""
        g = self.grid
        parr = np.asarray(p, dtype=float)
        if np.any(parr < 0.0) or np.any(parr > g.p_lo):
            raise ValueError(f"order {p} outside left-tail range [0, {g.p_lo}]")
        q1 = np.exp(self.eta_knots[0])
        out = parr / g.p_lo * q1
        return float(out) if np.isscalar(p) or parr.ndim == 0 else out

    def quantile(self, p):
        """Q_x(p) for p in [0, (m-1)/m]; left tail below 1/m.

        Orders within 1e-9 above (m-1)/m are clamped (guards rounding in
        composite expressions such as 1 - p/2); anything further is an error.
        """
        g = self.grid
        parr = np.asarray(p, dtype=float)
        scalar = np.isscalar(p) or parr.ndim == 0
        parr = np.atleast_1d(parr)
        if np.any(parr < 0.0) or np.any(parr > g.p_hi + 1e-9):
            raise ValueError(f"order {p} outside quantile domain [0, {g.p_hi}]")
        parr = np.minimum(parr, g.p_hi)
        out = np.empty_like(parr)
        low = parr < g.p_lo
        if np.any(low):
            out[low] = self.left_tail(parr[low])
        if np.any(~low):
            out[~low] = np.exp(np.interp(parr[~low], g.knots, self.eta_knots))
        return float(out[0]) if scalar else out

    __call__ = quantile


@dataclass(frozen=True)
class NoncrossReport:
    """Result of a non-crossing check.

    ``violations`` lists (x, j) pairs where the linear predictor decreases
    from knot j to knot j+1 (1-based knot numbering, exact comparison).
    """

    ok: bool
    violations: tuple


def check_noncrossing(surface: BetaSurface, xs) -> NoncrossReport:
    """Check monotonicity of eta_x over the knots for every x in xs.

    The comparison is exact (tolerance zero) on the computed linear
    predictor, so solver-level slack is not forgiven.
    """
    xs = list(xs)
    if len(xs) == 0:
        raise ValueError("xs must be nonempty")
    violations = []
    for x in xs:
        xv = np.atleast_1d(np.asarray(x, dtype=float))
        eta = surface.coeffs @ np.concatenate(([1.0], xv))
        bad = np.nonzero(eta[1:] < eta[:-1])[0]
        for k in bad:
            violations.append((xv.copy(), int(k) + 1))
    return NoncrossReport(ok=len(violations) == 0, violations=tuple(violations))


def write_surface_csv(surface: BetaSurface, path) -> None:
    """Write ``p,beta0,...,betad`` rows, one per knot, 17 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["p"] + [f"beta{k}" for k in range(surface.coeffs.shape[1])])
        for p, row in zip(surface.grid.knots, surface.coeffs):
            w.writerow([format(p, ".17g")] + [format(v, ".17g") for v in row])


def read_surface_csv(path) -> BetaSurface:
    """Parse a surface written by :func:`write_surface_csv`."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "p":
        raise ValueError(f"{path}: expected header starting with 'p'")
    ncol = len(rows[0]) - 1
    if ncol < 1:
        raise ValueError(f"{path}: expected at least one beta column")
    body = [r for r in rows[1:] if r]
    m = len(body) + 1
    grid = ProbGrid(m)
    ps = np.array([float(r[0]) for r in body])
    if np.max(np.abs(ps - grid.knots)) > 1e-9:
        raise ValueError(f"{path}: knot column is not the uniform grid j/{m}")
    coeffs = np.array([[float(v) for v in r[1:]] for r in body])
    if coeffs.shape[1] != ncol:
        raise ValueError(f"{path}: ragged rows")
    return BetaSurface(grid, coeffs)
