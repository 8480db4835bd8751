"""The flattened logistic oracle: quantiles, sampling, moments, exact curves."""

import math

import numpy as np
import pytest

mpmath = pytest.importorskip("mpmath")

from qineq import (
    CondQuantile,
    CurveKind,
    FldParams,
    InfiniteMomentError,
    SeriesConvergenceError,
    curve_value,
    efld_moment,
    efld_quantile_fn,
    efld_sample,
    efld_true_curve,
    efld_true_index,
    fld_mean_var,
    fld_quantile,
    hyp1f1,
    index,
    simpson,
    true_beta_surface,
)


# ---------------------------------------------------------------------------
# quantile function and moments of the base distribution


def test_quantile_closed_form():
    params = FldParams(0.0, 1.0, 2.0)
    want = math.log(3.0) + 2.0 * 0.75
    assert fld_quantile(params, 0.75) == pytest.approx(want, rel=1e-15)
    assert fld_quantile(params, 0.75) == pytest.approx(2.5986122886681098, rel=1e-12)
    # vectorized evaluation matches scalar calls
    ps = np.array([0.1, 0.5, 0.9])
    vec = fld_quantile(params, ps)
    assert np.allclose(vec, [fld_quantile(params, p) for p in ps], rtol=1e-15)


def test_quantile_is_strictly_increasing():
    params = FldParams(-1.0, 0.4, 7.0)
    ps = np.linspace(1e-6, 1 - 1e-6, 1000)
    assert np.all(np.diff(fld_quantile(params, ps)) > 0)


def test_quantile_domain_and_params():
    params = FldParams(0.0, 1.0, 0.0)
    for bad in (0.0, 1.0, -0.2, 1.2):
        with pytest.raises(ValueError):
            fld_quantile(params, bad)
    with pytest.raises(ValueError):
        FldParams(0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        FldParams(0.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        FldParams(0.0, 1.0, -0.5)
    with pytest.raises(ValueError):
        FldParams(math.nan, 1.0, 0.0)


def test_mean_var_closed_form():
    params = FldParams(0.5, 0.3, 2.0)
    mean, var = fld_mean_var(params)
    assert mean == pytest.approx(0.5 + 0.3 * 1.0, rel=1e-15)
    assert var == pytest.approx(0.09 * (2.0 + 4.0 / 12.0 + math.pi**2 / 3.0), rel=1e-15)
    # kappa = 0 reduces to the logistic with scale beta
    _, var0 = fld_mean_var(FldParams(0.0, 1.0, 0.0))
    assert var0 == pytest.approx(math.pi**2 / 3.0, rel=1e-15)


def test_mean_var_match_quadrature():
    params = FldParams(0.2, 0.5, 3.0)
    mean, var = fld_mean_var(params)
    # E g(Z) = integral of g(Q(p)) dp
    ps = np.linspace(0.0, 1.0, 200001)[1:-1]
    q = fld_quantile(params, ps)
    dx = ps[1] - ps[0]
    m1 = np.trapezoid(q, dx=dx)
    m2 = np.trapezoid(q**2, dx=dx)
    assert m1 == pytest.approx(mean, abs=1e-4)
    assert m2 - m1**2 == pytest.approx(var, abs=1e-3)


# ---------------------------------------------------------------------------
# sampling


def test_sampling_is_deterministic_and_in_range():
    x1, y1 = efld_sample(0.5, 0.2, 0.1, (0.0, 30.0), 500, seed=42)
    x2, y2 = efld_sample(0.5, 0.2, 0.1, (0.0, 30.0), 500, seed=42)
    assert np.array_equal(x1, x2) and np.array_equal(y1, y2)
    x3, _ = efld_sample(0.5, 0.2, 0.1, (0.0, 30.0), 500, seed=43)
    assert not np.array_equal(x1, x3)
    assert np.all((x1 >= 0.0) & (x1 <= 30.0))
    assert np.all(y1 > 0.0)


def test_sample_moments_match_formulas():
    alpha, beta, gamma, x = 0.5, 0.2, 0.1, 10.0
    n = 200000
    _, y = efld_sample(alpha, beta, gamma, (x, x + 1e-9), n, seed=7)
    params = FldParams(alpha, beta, gamma * x)
    for r in (1.0, 2.0):
        want = efld_moment(r, params)
        got = np.mean(y**r)
        se = np.std(y**r, ddof=1) / math.sqrt(n)
        assert abs(got - want) < 4 * se + 1e-12


def test_log_sample_matches_fld_mean_var():
    alpha, beta, gamma, x = 0.3, 0.4, 0.2, 5.0
    _, y = efld_sample(alpha, beta, gamma, (x, x + 1e-9), 200000, seed=11)
    z = np.log(y)
    mean, var = fld_mean_var(FldParams(alpha, beta, gamma * x))
    assert np.mean(z) == pytest.approx(mean, abs=0.02)
    assert np.var(z, ddof=1) == pytest.approx(var, rel=0.03)


def test_sample_validation():
    with pytest.raises(ValueError):
        efld_sample(0.5, 0.2, 0.1, (3.0, 3.0), 10, seed=0)
    with pytest.raises(ValueError):
        efld_sample(0.5, 0.2, 0.1, (0.0, 30.0), 0, seed=0)
    with pytest.raises(ValueError):
        efld_sample(0.5, -0.2, 0.1, (0.0, 30.0), 10, seed=0)


# ---------------------------------------------------------------------------
# confluent hypergeometric series


def test_hyp1f1_against_mpmath():
    rng = np.random.default_rng(5)
    for _ in range(40):
        a = rng.uniform(0.1, 3.0)
        b = rng.uniform(0.5, 4.0)
        z = rng.uniform(0.0, 20.0)
        want = float(mpmath.hyp1f1(a, b, z))
        assert hyp1f1(a, b, z) == pytest.approx(want, rel=1e-10)


def test_hyp1f1_special_values():
    assert hyp1f1(1.3, 2.0, 0.0) == 1.0
    # 1F1(a; a; z) = e^z
    assert hyp1f1(2.0, 2.0, 1.5) == pytest.approx(math.exp(1.5), rel=1e-12)


def test_hyp1f1_rejects_bad_b_and_budget():
    with pytest.raises(ValueError):
        hyp1f1(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        hyp1f1(1.0, -3.0, 1.0)
    assert hyp1f1(1.0, -2.5, 1.0) == pytest.approx(float(mpmath.hyp1f1(1.0, -2.5, 1.0)), rel=1e-9)
    with pytest.raises(SeriesConvergenceError):
        hyp1f1(2.0, 2.0, 50.0, max_terms=10)


# ---------------------------------------------------------------------------
# moments


def test_moment_matches_quantile_integral():
    # E Y^r = integral_0^1 exp(r Q_fld(p)) dp, integrated on a fine grid
    for params, r in [
        (FldParams(0.5, 0.2, 1.0), 1.0),
        (FldParams(0.5, 0.2, 3.0), 2.0),
        (FldParams(0.0, 0.45, 0.5), 1.0),
    ]:
        eps = 1e-6
        ps = np.linspace(eps, 1.0 - eps, 2_000_001)
        vals = np.exp(r * fld_quantile(params, ps))
        approx = simpson(vals, ps[1] - ps[0])
        want = efld_moment(r, params)
        assert approx == pytest.approx(want, rel=5e-3)


def test_moment_kappa_zero_reduces_to_beta_function():
    # with kappa = 0, E Y^r = pi r beta / sin(pi r beta)
    params = FldParams(0.0, 0.3, 0.0)
    want = math.pi * 0.3 / math.sin(math.pi * 0.3)
    assert efld_moment(1.0, params) == pytest.approx(want, rel=1e-12)


def test_moment_existence_boundary():
    params = FldParams(0.0, 0.5, 1.0)
    assert efld_moment(1.0, params) > 0
    with pytest.raises(InfiniteMomentError):
        efld_moment(2.0, params)
    with pytest.raises(InfiniteMomentError):
        efld_moment(1.0, FldParams(0.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        efld_moment(0.0, params)


# ---------------------------------------------------------------------------
# closed-form curves and indices


def test_true_curve_equals_quantile_ratio_route():
    # the closed form must agree with the generic curve of the EFLD quantile
    for beta, gx in [(0.2, 0.0), (0.2, 3.0), (0.5, 15.0)]:
        Q = efld_quantile_fn(0.5, beta, 1.0, gx)
        for kind in (CurveKind.QZ, CurveKind.QD):
            for p in np.linspace(0.05, 0.95, 19):
                direct = efld_true_curve(kind, beta, gx, p)
                generic = curve_value(kind, Q, p)
                assert direct == pytest.approx(generic, rel=1e-12)


def test_true_curve_boundary_values():
    for beta, gx in [(0.2, 0.0), (0.3, 9.0)]:
        assert efld_true_curve(CurveKind.QZ, beta, gx, 0.0) == 1.0
        assert efld_true_curve(CurveKind.QZ, beta, gx, 1.0) == 1.0
        assert efld_true_curve(CurveKind.QD, beta, gx, 0.0) == 1.0
        assert efld_true_curve(CurveKind.QD, beta, gx, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_true_index_matches_generic_index():
    for beta, gx in [(0.2, 0.1), (0.3, 6.0)]:
        Q = efld_quantile_fn(0.0, beta, 1.0, gx)
        for kind in (CurveKind.QZ, CurveKind.QD):
            want = index(kind, Q).value
            got = efld_true_index(kind, beta, gx)
            assert got == pytest.approx(want, abs=2e-3)


def test_true_index_monotone_in_flattening():
    # heavier flattening spreads the distribution and raises both indices
    vals = [efld_true_index(CurveKind.QD, 0.2, gx) for gx in (0.0, 1.0, 3.0, 9.0)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_true_curve_validation():
    with pytest.raises(ValueError):
        efld_true_curve(CurveKind.QZ, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        efld_true_curve(CurveKind.QZ, 0.2, -1.0, 0.5)
    with pytest.raises(ValueError):
        efld_true_curve(CurveKind.QZ, 0.2, 1.0, 1.5)


# ---------------------------------------------------------------------------
# exact coefficient surface


def test_true_surface_reproduces_conditional_quantiles():
    alpha, beta, gamma = 0.5, 0.2, 0.1
    surface = true_beta_surface(alpha, beta, gamma, 200)
    for x in (1.0, 15.0, 30.0):
        cq = CondQuantile(surface, x)
        Q = efld_quantile_fn(alpha, beta, gamma, x)
        for p in (0.1, 0.35, 0.5, 0.82):
            assert cq(p) == pytest.approx(Q(p), rel=1e-4)


def test_true_surface_index_close_to_closed_form():
    alpha, beta, gamma = 0.5, 0.2, 0.3
    surface = true_beta_surface(alpha, beta, gamma, 400)
    for x in (1.0, 30.0):
        got = index(CurveKind.QD, CondQuantile(surface, x)).value
        want = efld_true_index(CurveKind.QD, beta, gamma * x)
        assert got == pytest.approx(want, abs=5e-3)


def test_true_surface_columns():
    surface = true_beta_surface(0.5, 0.2, 0.1, 10)
    ps = surface.grid.knots
    assert np.allclose(surface.coeffs[:, 0], 0.5 + 0.2 * np.log(ps / (1 - ps)), rtol=1e-14)
    assert np.allclose(surface.coeffs[:, 1], 0.02 * ps, rtol=1e-14)
