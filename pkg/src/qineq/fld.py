"""Flattened logistic distribution: the exact-model oracle.

The flattened logistic distribution FLD(alpha, beta, kappa) is defined by
its quantile function

    Q(p) = alpha + beta [log(p / (1 - p)) + kappa p],  0 < p < 1,

a logistic distribution whose density is flattened around the centre as
kappa grows. Exponentiating gives the positive-valued EFLD, the response
model used throughout: with a scalar covariate x and parameters
(alpha, beta, gamma), log Y | X = x is FLD(alpha, beta, gamma x), so the
quantile-regression coefficient functions are exactly

    beta_0(p) = alpha + beta log(p / (1 - p)),   beta_1(p) = beta gamma p.

Both inequality curves of the EFLD have closed forms, and raw moments come
from a confluent hypergeometric series; the r-th moment exists iff
r beta < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .surface import BetaSurface, ProbGrid
from .inequality import CurveKind, simpson, _validate_n_points

__all__ = [
    "FldParams",
    "InfiniteMomentError",
    "SeriesConvergenceError",
    "fld_quantile",
    "fld_mean_var",
    "efld_quantile_fn",
    "efld_sample",
    "hyp1f1",
    "efld_moment",
    "efld_true_curve",
    "efld_true_index",
    "true_beta_surface",
]


class InfiniteMomentError(ValueError):
    """Requested moment does not exist (r beta >= 1)."""


class SeriesConvergenceError(RuntimeError):
    """Series did not reach the tail tolerance within the term budget."""


@dataclass(frozen=True)
class FldParams:
    """Location alpha, scale beta > 0, flattening kappa >= 0."""

    alpha: float
    beta: float
    kappa: float

    def __post_init__(self):
        for name in ("alpha", "beta", "kappa"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if not (self.beta > 0):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be nonnegative, got {self.kappa}")


def fld_quantile(params: FldParams, p):
    """Quantile function of FLD(alpha, beta, kappa); p strictly inside (0, 1)."""
    parr = np.asarray(p, dtype=float)
    if np.any(parr <= 0.0) or np.any(parr >= 1.0):
        raise ValueError("quantile order must lie strictly inside (0, 1)")
    out = params.alpha + params.beta * (np.log(parr / (1.0 - parr)) + params.kappa * parr)
    return float(out) if np.isscalar(p) or parr.ndim == 0 else out


def fld_mean_var(params: FldParams):
    """Mean and variance of the FLD in closed form."""
    k = params.kappa
    mean = params.alpha + params.beta * k / 2.0
    var = params.beta**2 * (k + k**2 / 12.0 + math.pi**2 / 3.0)
    return mean, var


def efld_quantile_fn(alpha, beta, gamma, x):
    """Conditional EFLD quantile function p -> exp(Q_FLD(p)) at covariate x."""
    params = FldParams(alpha, beta, gamma * x)

    def Q(p):
        return np.exp(fld_quantile(params, p))

    return Q


def efld_sample(alpha, beta, gamma, x_range, n, seed):
    """Draw (x, y): x uniform on x_range, log y | x ~ FLD(alpha, beta, gamma x).

    Inverse-transform sampling; deterministic for a given seed. Returns a
    pair of arrays (x, y).
    """
    lo, hi = float(x_range[0]), float(x_range[1])
    if not lo < hi:
        raise ValueError(f"x_range must satisfy lo < hi, got ({lo}, {hi})")
    if n < 1:
        raise ValueError("n must be at least 1")
    FldParams(alpha, beta, 0.0)  # validate alpha, beta early
    rng = np.random.default_rng(seed)
    x = rng.uniform(lo, hi, size=n)
    u = rng.random(n)
    u[u == 0.0] = 2.0**-53  # keep the logit finite
    z = alpha + beta * (np.log(u / (1.0 - u)) + gamma * x * u)
    return x, np.exp(z)


def hyp1f1(a, b, z, rel_tol=1e-12, max_terms=10000) -> float:
    """Confluent hypergeometric 1F1(a; b; z) by the forward power series.

    Terms are accumulated until the next term is below rel_tol relative to
    the running sum; exceeding max_terms raises SeriesConvergenceError.
    """
    b = float(b)
    if b <= 0 and b == int(b):
        raise ValueError(f"b must not be a nonpositive integer, got {b}")
    a = float(a)
    z = float(z)
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        term *= (a + k) * z / ((b + k) * (k + 1))
        total += term
        if abs(term) <= rel_tol * abs(total):
            return total
    raise SeriesConvergenceError(
        f"1F1({a}; {b}; {z}) did not converge within {max_terms} terms"
    )


def efld_moment(r, params: FldParams) -> float:
    """r-th raw moment of the EFLD, finite iff r beta < 1.

    E Y^r = exp(r alpha) 1F1(1 + r beta; 2; r beta kappa)
            * pi beta r / sin(pi beta r).
    """
    r = float(r)
    if r <= 0:
        raise ValueError(f"moment order must be positive, got {r}")
    rb = r * params.beta
    if rb >= 1.0:
        raise InfiniteMomentError(
            f"moment of order {r} is infinite for beta = {params.beta} (r beta = {rb} >= 1)"
        )
    return (
        math.exp(r * params.alpha)
        * hyp1f1(1.0 + rb, 2.0, rb * params.kappa)
        * math.pi * rb / math.sin(math.pi * rb)
    )


def efld_true_curve(kind: CurveKind, beta, gx, p):
    """Closed-form inequality curve of the EFLD with kappa = gx.

    qZ(p) = 1 - [p(1-p) / ((1+p)(2-p))]^beta exp(-beta gx / 2)
    qD(p) = 1 - [p / (2-p)]^(2 beta)        exp(beta gx (p - 1))

    Both extend continuously to the boundary conventions, so any p in
    [0, 1] is accepted.
    """
    kind = CurveKind(kind)
    if not (beta > 0):
        raise ValueError(f"beta must be positive, got {beta}")
    if gx < 0:
        raise ValueError(f"gx must be nonnegative, got {gx}")
    parr = np.asarray(p, dtype=float)
    if np.any(parr < 0.0) or np.any(parr > 1.0):
        raise ValueError("curve argument must lie in [0, 1]")
    if kind is CurveKind.QZ:
        out = 1.0 - (parr * (1.0 - parr) / ((1.0 + parr) * (2.0 - parr))) ** beta \
            * np.exp(-beta * gx / 2.0)
    else:
        out = 1.0 - (parr / (2.0 - parr)) ** (2.0 * beta) \
            * np.exp(beta * gx * (parr - 1.0))
    return float(out) if np.isscalar(p) or parr.ndim == 0 else out


def efld_true_index(kind: CurveKind, beta, gx, n_points=201) -> float:
    """Exact-model index: composite Simpson over the closed-form curve."""
    n_points = _validate_n_points(n_points)
    ps = np.linspace(0.0, 1.0, n_points)
    return simpson(efld_true_curve(kind, beta, gx, ps), 1.0 / (n_points - 1))


def true_beta_surface(alpha, beta, gamma, m) -> BetaSurface:
    """Exact coefficient functions sampled on the order grid.

    Column 0 is alpha + beta logit(p); column 1 is beta gamma p.
    """
    grid = ProbGrid(m)
    ps = grid.knots
    b0 = alpha + beta * np.log(ps / (1.0 - ps))
    b1 = beta * gamma * ps
    return BetaSurface(grid, np.column_stack([b0, b1]))
