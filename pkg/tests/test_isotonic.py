"""Pool-adjacent-violators: fixed cases, projection optimality, sup-error dominance."""

import numpy as np
import pytest
from scipy.optimize import minimize

from qineq import BetaSurface, ProbGrid, isotonize_surface, pava


def test_two_point_pool():
    fit = pava([3.0, 1.0])
    assert np.allclose(fit.values, [2.0, 2.0])
    assert fit.blocks == ((0, 2, 2.0),)
    assert fit.pooled


def test_three_point_pool_then_tie():
    fit = pava([3.0, 1.0, 2.0])
    assert np.allclose(fit.values, [2.0, 2.0, 2.0])
    # the trailing 2.0 needed no pooling; it is its own block
    assert fit.blocks == ((0, 2, 2.0), (2, 3, 2.0))


def test_sorted_input_unchanged():
    v = [1.0, 2.0, 2.0, 5.0]
    fit = pava(v)
    assert np.array_equal(fit.values, v)
    assert all(stop - start == 1 for start, stop, _ in fit.blocks)
    assert not fit.pooled


def test_weighted_pool():
    fit = pava([1.0, 3.0, 2.0], weights=[1.0, 1.0, 2.0])
    assert np.allclose(fit.values, [1.0, 7.0 / 3.0, 7.0 / 3.0])


def test_idempotent_and_mean_preserving():
    rng = np.random.default_rng(2)
    for _ in range(30):
        n = int(rng.integers(1, 40))
        v = rng.normal(size=n)
        w = rng.uniform(0.5, 3.0, size=n)
        fit = pava(v, w)
        assert np.all(np.diff(fit.values) >= 0)
        assert np.average(fit.values, weights=w) == pytest.approx(
            np.average(v, weights=w), rel=1e-12, abs=1e-12
        )
        again = pava(fit.values, w)
        assert np.array_equal(again.values, fit.values)


def test_blocks_partition_the_index_range():
    rng = np.random.default_rng(4)
    v = rng.normal(size=25)
    fit = pava(v)
    edges = [b[:2] for b in fit.blocks]
    assert edges[0][0] == 0 and edges[-1][1] == 25
    for (a, b), (c, _) in zip(edges, edges[1:]):
        assert b == c
    for start, stop, val in fit.blocks:
        assert np.all(fit.values[start:stop] == val)


def test_pava_is_the_weighted_monotone_projection():
    # independent oracle: constrained least squares via SLSQP
    rng = np.random.default_rng(9)
    for _ in range(10):
        n = 5
        v = rng.normal(size=n)
        w = rng.uniform(0.5, 2.0, size=n)
        fit = pava(v, w)

        def obj(u):
            return np.sum(w * (u - v) ** 2)

        cons = [{"type": "ineq", "fun": (lambda u, i=i: u[i + 1] - u[i])}
                for i in range(n - 1)]
        res = minimize(obj, np.sort(v), constraints=cons, method="SLSQP",
                       options={"ftol": 1e-14, "maxiter": 500})
        assert obj(fit.values) <= obj(res.x) + 1e-9
        assert np.allclose(fit.values, res.x, atol=1e-5)


def test_pava_validation():
    with pytest.raises(ValueError):
        pava([])
    with pytest.raises(ValueError):
        pava([1.0, np.nan])
    with pytest.raises(ValueError):
        pava([1.0, 2.0], weights=[1.0])
    with pytest.raises(ValueError):
        pava([1.0, 2.0], weights=[1.0, -1.0])


def test_isotonize_surface_per_column():
    grid = ProbGrid(4)
    coeffs = np.column_stack([[1.0, 0.5, 2.0], [0.0, 1.0, 2.0]])
    out = isotonize_surface(BetaSurface(grid, coeffs))
    assert np.allclose(out.coeffs[:, 0], [0.75, 0.75, 2.0])
    assert np.allclose(out.coeffs[:, 1], [0.0, 1.0, 2.0])
    assert out.grid is grid


def test_sup_error_dominance_small():
    # smaller sibling of the acceptance suite: output never farther (in sup
    # norm) from a nondecreasing truth than the input, strictly better on
    # pooled blocks
    rng = np.random.default_rng(21)
    pooled_seen = 0
    for _ in range(200):
        n = int(rng.integers(3, 30))
        truth = np.cumsum(rng.uniform(0, 1, size=n))
        noisy = truth + rng.normal(0, 0.5, size=n)
        fit = pava(noisy)
        sup_in = np.max(np.abs(noisy - truth))
        sup_out = np.max(np.abs(fit.values - truth))
        assert sup_out <= sup_in + 1e-12 * (1.0 + sup_in)
        for start, stop, _ in fit.blocks:
            if stop - start > 1:
                pooled_seen += 1
                blk_in = np.max(np.abs(noisy[start:stop] - truth[start:stop]))
                blk_out = np.max(np.abs(fit.values[start:stop] - truth[start:stop]))
                assert blk_out < blk_in
    assert pooled_seen > 50
