"""Smooth surrogates for the absolute value and gradient-based quantile fits.

Three losses at scale tau > 0, each approaching |u| as tau -> 0:

    g_tau(u) = tau [log(1 + e^(-u/tau)) + log(1 + e^(u/tau))]   (over-approx)
    h_tau(u) = u tanh(u/tau)                                     (under-approx)
    f_tau    = (g_tau + h_tau) / 2                               (convex)

Replacing |u| by f_tau in 2 rho_p(u) = |u| + (2p - 1) u gives a twice
differentiable strictly convex objective whose minimizer converges to the
check-loss fit. Minimization is damped Newton with a decreasing-tau
continuation so that tiny target scales stay inside the curvature region.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize

from .qr import Dataset, FitResult, FitStatus, GridFit, check_loss_sum, oqr_fit, _validate_order
from .surface import BetaSurface, ProbGrid

__all__ = [
    "LossKind",
    "SmoothLoss",
    "TauRule",
    "loss_eval",
    "aqr_objective",
    "aqr_fit",
    "aqr_fit_grid",
    "tau_default",
]

TAU_FLOOR = 1e-8


class LossKind(Enum):
    G = "g"
    H = "h"
    F = "f"


class TauRule(Enum):
    IQR_REGRESSION = "iqr"
    IID_SD = "sd"


@dataclass(frozen=True)
class SmoothLoss:
    """A smooth absolute-value surrogate at scale tau."""

    tau: float
    kind: LossKind = LossKind.F

    def __post_init__(self):
        if not (self.tau > 0):
            raise ValueError(f"tau must be positive, got {self.tau}")
        object.__setattr__(self, "kind", LossKind(self.kind))


def _scaled(u, tau):
    # overflow-safe u/tau; keeps downstream products finite
    return np.clip(np.asarray(u, dtype=float) / tau, -8e307, 8e307)


def _sech2(t):
    """sech^2(t) via s = exp(-2|t|), 4s/(1+s)^2; underflows cleanly to 0."""
    s = np.exp(-2.0 * np.abs(t))
    return 4.0 * s / (1.0 + s) ** 2


def _g_vdh(u, tau):
    u = np.asarray(u, dtype=float)
    t = _scaled(u, tau)
    at = np.abs(t)
    value = np.abs(u) + 2.0 * tau * np.log1p(np.exp(-at))
    deriv = np.tanh(t / 2.0)
    second = _sech2(t / 2.0) / (2.0 * tau)
    return value, deriv, second


def _h_vdh(u, tau):
    u = np.asarray(u, dtype=float)
    t = _scaled(u, tau)
    th = np.tanh(t)
    s2 = _sech2(t)
    value = u * th
    deriv = th + t * s2
    second = (2.0 / tau) * s2 * (1.0 - t * th)
    return value, deriv, second


def _f_vdh(u, tau):
    gv, gd, gh = _g_vdh(u, tau)
    hv, hd, hh = _h_vdh(u, tau)
    return 0.5 * (gv + hv), 0.5 * (gd + hd), 0.5 * (gh + hh)


_VDH = {LossKind.G: _g_vdh, LossKind.H: _h_vdh, LossKind.F: _f_vdh}


def loss_eval(loss: SmoothLoss, u):
    """Value and first derivative of the surrogate, elementwise.

    Returns (value, deriv) with the same shape as ``u``.
    """
    value, deriv, _ = _VDH[loss.kind](u, loss.tau)
    return value, deriv


def aqr_objective(data: Dataset, p, tau, beta):
    """Smoothed order-p objective and its gradient in beta.

    Objective: sum_i [f_tau(r_i) + (2p - 1) r_i] with r = z - X beta;
    equals twice the check loss in the tau -> 0 limit.
    """
    _validate_order(p)
    if not (tau > 0):
        raise ValueError(f"tau must be positive, got {tau}")
    beta = np.asarray(beta, dtype=float)
    r = data.z - data.X @ beta
    value, deriv, _ = _f_vdh(r, tau)
    slope = 2.0 * p - 1.0
    total = float(np.sum(value) + slope * np.sum(r))
    grad = -data.X.T @ (deriv + slope)
    return total, grad


def _newton(X, z, p, tau, beta, tol_rel, max_steps):
    """Damped Newton on the smoothed objective. Returns (beta, steps, converged)."""
    slope = 2.0 * p - 1.0
    k = X.shape[1]

    def full_eval(b):
        r = z - X @ b
        v, d, h = _f_vdh(r, tau)
        val = float(np.sum(v) + slope * np.sum(r))
        grad = -X.T @ (d + slope)
        return val, grad, h

    def value_only(b):
        r = z - X @ b
        v, _, _ = _f_vdh(r, tau)
        return float(np.sum(v) + slope * np.sum(r))

    val, grad, hdiag = full_eval(beta)
    stall = 0
    for step in range(1, max_steps + 1):
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= tol_rel * (1.0 + abs(val)):
            return beta, step - 1, True
        if stall >= 5:
            return beta, step - 1, False
        H = X.T @ (hdiag[:, None] * X)
        ridge = 1e-12 * (1.0 + np.trace(H) / k)
        H[np.diag_indices(k)] += ridge
        try:
            delta = np.linalg.solve(H, -grad)
        except np.linalg.LinAlgError:
            delta = -grad
        slope_dir = float(grad @ delta)
        if not np.isfinite(slope_dir) or slope_dir >= 0:
            delta = -grad
            slope_dir = -gnorm**2
        fuzz = 1e-12 * (1.0 + abs(val))
        if -slope_dir <= fuzz:
            # predicted decrease is below the value's float resolution, so a
            # line search would compare rounding noise; take the full step
            # iff it shrinks the gradient, else report nonconvergence
            cand = beta + delta
            nval, ngrad, nhd = full_eval(cand)
            ok = (
                np.isfinite(nval)
                and float(np.linalg.norm(ngrad)) < gnorm
                and nval <= val + fuzz
            )
            if not ok:
                return beta, step, False
        else:
            t = 1.0
            accepted = False
            for _ in range(60):
                cand = beta + t * delta
                vc = value_only(cand)
                if np.isfinite(vc) and vc <= val + 1e-4 * t * slope_dir:
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                return beta, step, False
            nval, ngrad, nhd = full_eval(cand)
        if nval >= val - fuzz and float(np.linalg.norm(ngrad)) >= gnorm:
            stall += 1
        else:
            stall = 0
        beta, val, grad, hdiag = cand, nval, ngrad, nhd
    return beta, max_steps, False


def aqr_fit(data: Dataset, p, tau, max_iter=10000, init=None) -> FitResult:
    """Order-p fit by minimizing the smoothed objective at scale tau.

    Starts from least squares (or ``init``), walks tau down geometrically
    from a residual-spread scale to the target so the Newton steps always
    see curvature, then polishes at the target tolerance
    ||grad|| <= 1e-8 (1 + |objective|). Reports MAX_ITERATIONS honestly if
    the budget runs out.
    """
    _validate_order(p)
    if not (tau > 0):
        raise ValueError(f"tau must be positive, got {tau}")
    X, z = data.X, data.z
    if init is None:
        beta, *_ = np.linalg.lstsq(X, z, rcond=None)
    else:
        beta = np.asarray(init, dtype=float).copy()
        if beta.shape != (X.shape[1],):
            raise ValueError("init has wrong shape")

    spread = float(np.std(z - X @ beta))
    tau0 = max(tau, spread / 4.0)
    schedule = []
    t = tau0
    while t > tau * 4.0:
        schedule.append(t)
        t /= 4.0
    schedule.append(tau)

    used = 0
    converged = False
    for stage, tk in enumerate(schedule):
        last = stage == len(schedule) - 1
        tol = 1e-8 if last else 1e-5
        budget = max_iter - used
        if budget <= 0:
            break
        beta, steps, converged = _newton(X, z, p, tk, beta, tol, budget)
        used += steps
        if last and not converged:
            # bounded quasi-Newton rescue, then one more Newton polish
            res = minimize(
                lambda b: aqr_objective(data, p, tau, b),
                beta,
                jac=True,
                method="L-BFGS-B",
                options={"maxiter": max(50, max_iter - used)},
            )
            used += int(res.nit)
            if np.isfinite(res.fun):
                beta = res.x
            beta, steps, converged = _newton(X, z, p, tau, beta, 1e-8, 100)
            used += steps

    value, grad = aqr_objective(data, p, tau, beta)
    return FitResult(
        beta=np.asarray(beta, dtype=float),
        objective=check_loss_sum(data, beta, p),
        status=FitStatus.OPTIMAL if converged else FitStatus.MAX_ITERATIONS,
        p=float(p),
        iterations=used,
        smooth_objective=value,
        grad_norm=float(np.linalg.norm(grad)),
    )


def aqr_fit_grid(data: Dataset, grid: ProbGrid, tau, max_iter=10000) -> GridFit:
    """Smoothed fit at every knot; adjacent knots warm-start each other."""
    rows = []
    statuses = []
    prev = None
    for p in grid.knots:
        fit = aqr_fit(data, p, tau, max_iter=max_iter, init=prev)
        prev = fit.beta
        rows.append(fit.beta)
        statuses.append(fit.status)
    return GridFit(BetaSurface(grid, np.vstack(rows)), tuple(statuses))


def tau_default(data: Dataset, rule=TauRule.IQR_REGRESSION) -> float:
    """Data-driven smoothing scale.

    IQR_REGRESSION: (fitted interquartile range of the response at the
    covariate mean) / sqrt(n), from two plain order fits at 0.25 and 0.75.
    IID_SD: sample standard deviation of z over sqrt(n). A nonpositive
    fitted IQR falls back to the sd rule with a warning. The result is
    floored at 1e-8.
    """
    rule = TauRule(rule)
    n = data.n
    tau = None
    if rule is TauRule.IQR_REGRESSION:
        if data.d < 1:
            raise ValueError("the IQR rule needs at least one covariate")
        xbar = np.concatenate(([1.0], data.mean_covariates()))
        lo = oqr_fit(data, 0.25)
        hi = oqr_fit(data, 0.75)
        iqr = float(np.exp(hi.beta @ xbar) - np.exp(lo.beta @ xbar))
        if iqr > 0:
            tau = iqr / np.sqrt(n)
        else:
            warnings.warn(
                "nonpositive fitted interquartile range; falling back to the sd rule",
                RuntimeWarning,
                stacklevel=2,
            )
    if tau is None:
        tau = float(np.std(data.z, ddof=1)) / np.sqrt(n)
    return max(float(tau), TAU_FLOOR)
