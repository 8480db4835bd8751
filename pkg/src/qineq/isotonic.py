"""Weighted isotonic regression (pool-adjacent-violators) for surfaces.

Monotonizing each coefficient column of a fitted surface never worsens,
and on pooled blocks strictly improves, the sup-distance to any
nondecreasing target: isotonization is a free repair step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .surface import BetaSurface

__all__ = ["IsotonicFit", "pava", "isotonize_surface"]


@dataclass(frozen=True)
class IsotonicFit:
    """PAVA output.

    values : nondecreasing fitted sequence, same length as the input.
    blocks : tuple of (start, stop, value) with half-open index ranges
        [start, stop); singleton blocks are untouched input points, longer
        blocks carry the pooled weighted mean.
    """

    values: np.ndarray
    blocks: tuple

    @property
    def pooled(self) -> bool:
        return any(stop - start > 1 for start, stop, _ in self.blocks)


def pava(values, weights=None) -> IsotonicFit:
    """Nondecreasing least-squares fit by pool-adjacent-violators.

    Adjacent strict decreases are merged into weighted-mean blocks until the
    sequence is nondecreasing; ties are left as separate blocks. With no
    violations the input is returned unchanged.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("values must be a nonempty 1-d array")
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    if weights is None:
        w = np.ones_like(v)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != v.shape:
            raise ValueError("weights must match values in length")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be positive and finite")

    # stack of [start, weight sum, mean]; singleton means stay exact so an
    # already-monotone input round trips unchanged
    starts = []
    wsums = []
    means = []
    for i in range(v.size):
        starts.append(i)
        wsums.append(w[i])
        means.append(v[i])
        while len(starts) >= 2 and means[-2] > means[-1]:
            wtot = wsums[-2] + wsums[-1]
            means[-2] = (wsums[-2] * means[-2] + wsums[-1] * means[-1]) / wtot
            wsums[-2] = wtot
            starts.pop()
            means.pop()
            wsums.pop()

    out = np.empty_like(v)
    blocks = []
    bounds = starts + [v.size]
    for k in range(len(starts)):
        start, stop = bounds[k], bounds[k + 1]
        out[start:stop] = means[k]
        blocks.append((start, stop, means[k]))
    return IsotonicFit(values=out, blocks=tuple(blocks))


def isotonize_surface(surface: BetaSurface, weights=None) -> BetaSurface:
    """Apply PAVA to every coefficient column of a surface."""
    cols = [pava(surface.coeffs[:, k], weights).values
            for k in range(surface.coeffs.shape[1])]
    return BetaSurface(surface.grid, np.column_stack(cols))
