"""Quantile-ratio inequality curves and their integrated indices.

For a quantile function Q the two curves are

    qZ(p) = 1 - Q(p/2) / Q((1+p)/2)      (median-anchored)
    qD(p) = 1 - Q(p/2) / Q(1 - p/2)      (tail-symmetric)

with the boundary conventions qZ(0) = qZ(1) = qD(0) = 1 and qD(1) = 0.
Each index is the integral of its curve over [0, 1], computed by composite
Simpson on a uniform sample of the curve. For grid-backed conditional
quantile functions the curve is evaluated wherever both required orders are
inside the quantile domain and joined to its boundary value by linear
interpolation of the curve itself; the quantile function is never
extrapolated beyond its last knot.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .surface import BetaSurface, CondQuantile

__all__ = [
    "CurveKind",
    "CurveSample",
    "IndexValue",
    "curve_value",
    "simpson",
    "sample_curve",
    "index",
    "measure_curve",
    "write_curve_csv",
    "write_index_csv",
]


class CurveKind(Enum):
    QZ = "qz"
    QD = "qd"


_BOUNDARY = {
    CurveKind.QZ: {0.0: 1.0, 1.0: 1.0},
    CurveKind.QD: {0.0: 1.0, 1.0: 0.0},
}


@dataclass(frozen=True)
class CurveSample:
    """A curve evaluated on an ascending order grid including 0 and 1."""

    kind: CurveKind
    ps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ps = np.asarray(self.ps, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if ps.shape != values.shape or ps.ndim != 1:
            raise ValueError("ps and values must be matching 1-d arrays")
        if ps[0] != 0.0 or ps[-1] != 1.0 or np.any(np.diff(ps) <= 0):
            raise ValueError("ps must ascend strictly from 0 to 1")
        object.__setattr__(self, "ps", ps)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class IndexValue:
    """An integrated inequality curve: which curve, for what, and the value."""

    kind: CurveKind
    value: float
    method: str = ""
    x: object = "unconditional"


def _orders(kind: CurveKind, p):
    num = p / 2.0
    if kind is CurveKind.QZ:
        den = (1.0 + p) / 2.0
    else:
        den = 1.0 - p / 2.0
    return num, den


def curve_value(kind: CurveKind, Q, p) -> float:
    """One curve point. Q is a callable quantile function.

    At p = 0 and p = 1 the boundary constants are returned without
    evaluating Q. A nonpositive denominator quantile or a negative
    numerator quantile is a domain error.
    """
    kind = CurveKind(kind)
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"curve argument must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return _BOUNDARY[kind][p]
    num_p, den_p = _orders(kind, p)
    qnum = float(Q(num_p))
    qden = float(Q(den_p))
    if not (qden > 0.0):
        raise ValueError(f"quantile at order {den_p} must be positive, got {qden}")
    if qnum < 0.0:
        raise ValueError(f"quantile at order {num_p} must be nonnegative, got {qnum}")
    return 1.0 - qnum / qden


def simpson(values, dx) -> float:
    """Composite Simpson rule over uniformly spaced samples.

    Requires an odd sample count >= 3; exact for cubics.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 3:
        raise ValueError("need a 1-d array of at least 3 samples")
    if v.size % 2 == 0:
        raise ValueError(f"Simpson needs an odd sample count, got {v.size}")
    if not (dx > 0):
        raise ValueError(f"dx must be positive, got {dx}")
    return float(dx / 3.0 * (v[0] + v[-1] + 4.0 * v[1:-1:2].sum() + 2.0 * v[2:-2:2].sum()))


def _validate_n_points(n_points):
    if int(n_points) != n_points or n_points < 51 or n_points % 2 == 0:
        raise ValueError(f"n_points must be an odd integer >= 51, got {n_points}")
    return int(n_points)


def _sample_grid(kind: CurveKind, cq: CondQuantile, ps: np.ndarray) -> np.ndarray:
    """Curve samples for a knot-limited quantile function.

    The quantile domain is [0, p_hi]. qZ needs the order (1+p)/2, so its
    curve is computable for p <= 2 p_hi - 1 and linearly joined to (1, 1)
    beyond; qD needs 1 - p/2, computable for p >= 2 (1 - p_hi) and joined
    to (0, 1) below.
    """
    p_hi = cq.grid.p_hi
    out = np.empty_like(ps)
    if kind is CurveKind.QZ:
        edge = 2.0 * p_hi - 1.0
        main = ps <= edge
        num, den = _orders(kind, ps[main])
        qn = cq.quantile(num)
        qd = cq.quantile(den)
        _check_ratio(qn, qd)
        out[main] = 1.0 - qn / qd
        if np.any(~main):
            v_edge = curve_value(kind, cq, edge)
            w = (ps[~main] - edge) / (1.0 - edge)
            out[~main] = v_edge + w * (1.0 - v_edge)
    else:
        edge = 2.0 / cq.grid.m
        main = ps >= edge
        num, den = _orders(kind, ps[main])
        qn = cq.quantile(num)
        qd = cq.quantile(den)
        _check_ratio(qn, qd)
        out[main] = 1.0 - qn / qd
        if np.any(~main):
            v_edge = curve_value(kind, cq, edge)
            w = ps[~main] / edge
            out[~main] = 1.0 + w * (v_edge - 1.0)
    out[0] = _BOUNDARY[kind][0.0]
    out[-1] = _BOUNDARY[kind][1.0]
    return out


def _check_ratio(qn, qd):
    if np.any(~(qd > 0.0)):
        raise ValueError("quantile must be positive at denominator orders")
    if np.any(qn < 0.0):
        raise ValueError("quantile must be nonnegative at numerator orders")


def _sample_callable(kind: CurveKind, Q, ps: np.ndarray) -> np.ndarray:
    out = np.empty_like(ps)
    out[0] = _BOUNDARY[kind][0.0]
    out[-1] = _BOUNDARY[kind][1.0]
    for i in range(1, ps.size - 1):
        out[i] = curve_value(kind, Q, ps[i])
    return out


def sample_curve(kind: CurveKind, Q, n_points=201) -> CurveSample:
    """Evaluate a curve on the uniform grid linspace(0, 1, n_points)."""
    kind = CurveKind(kind)
    n_points = _validate_n_points(n_points)
    ps = np.linspace(0.0, 1.0, n_points)
    if isinstance(Q, CondQuantile):
        values = _sample_grid(kind, Q, ps)
    elif callable(Q):
        values = _sample_callable(kind, Q, ps)
    else:
        raise TypeError("Q must be a CondQuantile or a callable quantile function")
    return CurveSample(kind=kind, ps=ps, values=values)


def index(kind: CurveKind, Q, n_points=201, method="", x=None) -> IndexValue:
    """Integrated inequality curve by composite Simpson.

    The raw integral is returned unclamped; for a positive nondecreasing
    quantile function it lies in [0, 1] up to discretization.
    """
    kind = CurveKind(kind)
    cs = sample_curve(kind, Q, n_points)
    value = simpson(cs.values, 1.0 / (n_points - 1))
    if x is None:
        if isinstance(Q, CondQuantile):
            xq = Q.x
            x = float(xq[0]) if xq.size == 1 else xq.copy()
        else:
            x = "unconditional"
    return IndexValue(kind=kind, value=value, method=method, x=x)


def measure_curve(kind: CurveKind, surface: BetaSurface, xs, n_points=201, method="") -> list:
    """Index as a function of the covariate: [(x, IndexValue), ...]."""
    out = []
    for x in xs:
        iv = index(kind, CondQuantile(surface, x), n_points=n_points, method=method)
        out.append((x, iv))
    return out


def write_curve_csv(sample: CurveSample, path) -> None:
    """Write ``p,value`` rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["p", "value"])
        for p, v in zip(sample.ps, sample.values):
            w.writerow([format(p, ".17g"), format(v, ".17g")])


def write_index_csv(rows, path, extra_fields=()) -> None:
    """Write ``x,kind,method,value`` rows from (x, IndexValue) pairs.

    ``extra_fields`` appends named columns taken from a mapping supplied as
    a third tuple element.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "kind", "method", "value"] + list(extra_fields))
        for row in rows:
            x, iv = row[0], row[1]
            extras = row[2] if len(row) > 2 else {}
            xrep = format(float(x), ".17g") if np.isscalar(x) or np.ndim(x) == 0 \
                else " ".join(format(float(v), ".17g") for v in np.atleast_1d(x))
            w.writerow(
                [xrep, iv.kind.value, iv.method, format(iv.value, ".17g")]
                + [extras.get(name, "") for name in extra_fields]
            )
