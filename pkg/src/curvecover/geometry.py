"""Polygonal curves, curve parameters and basic metric primitives.

A curve location is stored as ``CurveParam(edge, t)`` rather than a single
float in [0,1]: on curves with many edges a global fraction loses precision.
Conversion to the global (uniform per-edge) fraction is provided for
reporting.  Internally most routines work on the *grid coordinate*
``g = edge - 1 + t`` which lives in ``[0, n]`` for a curve with ``n`` edges.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Sequence

import numpy as np

COORD_TOL = 1e-9

try:  # optional: speeds up the discrete Frechet oracle considerably
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def _njit(*a, **k):
        def deco(f):
            return f

        return deco if not (len(a) == 1 and callable(a[0])) else a[0]


class ParameterError(ValueError):
    """Raised for out-of-range or mis-ordered curve parameters."""


class DegenerateSubcurveError(ParameterError):
    """Raised when a zero-length subcurve is requested."""


class CurveParam(NamedTuple):
    """Location on a polygonal curve: edge index in [1, n], fraction in [0, 1].

    Canonical form keeps t < 1 except at the very end of the curve, so each
    point has a single representation and tuple comparison gives the natural
    order along the curve.
    """

    edge: int
    t: float

    def to_grid(self) -> float:
        return self.edge - 1 + self.t


def param_from_grid(g: float, n_edges: int) -> CurveParam:
    """Canonical CurveParam for grid coordinate ``g`` in [0, n_edges]."""
    g = float(g)
    if g < -COORD_TOL or g > n_edges + COORD_TOL:
        raise ParameterError(f"grid coordinate {g} outside [0, {n_edges}]")
    g = min(max(g, 0.0), float(n_edges))
    edge = int(math.floor(g)) + 1
    if edge > n_edges:
        return CurveParam(n_edges, 1.0)
    t = g - (edge - 1)
    if t >= 1.0:  # floating point at an interior vertex
        return CurveParam(edge + 1, 0.0) if edge < n_edges else CurveParam(n_edges, 1.0)
    return CurveParam(edge, t)


def canonical(p: CurveParam, n_edges: int) -> CurveParam:
    """Normalize an (edge, t) pair to canonical form."""
    if not 1 <= p.edge <= n_edges:
        raise ParameterError(f"edge {p.edge} outside [1, {n_edges}]")
    if not 0.0 <= p.t <= 1.0:
        raise ParameterError(f"fraction {p.t} outside [0, 1]")
    if p.t == 1.0 and p.edge < n_edges:
        return CurveParam(p.edge + 1, 0.0)
    return CurveParam(p.edge, float(p.t))


class PolygonalCurve:
    """Piecewise-linear curve in R^d defined by an ordered vertex list.

    Zero-length edges (consecutive duplicate vertices) are removed at
    construction; ``dropped_duplicates`` records how many.  Immutable after
    construction.
    """

    __slots__ = (
        "curve_id",
        "vertices",
        "prefix_lengths",
        "dropped_duplicates",
        "_bbox",
    )

    def __init__(self, vertices, curve_id: str | None = None, tol: float = COORD_TOL):
        pts = np.asarray(vertices, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] < 1:
            raise ParameterError("a curve needs at least 2 points in R^d, d >= 1")
        if not np.all(np.isfinite(pts)):
            raise ParameterError("curve coordinates must be finite")
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        keep = np.concatenate(([True], seg > tol))
        dropped = int(np.size(keep) - np.count_nonzero(keep))
        pts = pts[keep]
        if pts.shape[0] < 2:
            raise ParameterError("curve degenerates to a single point after dedup")
        self.curve_id = curve_id
        self.vertices = pts
        self.vertices.setflags(write=False)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        self.prefix_lengths = np.concatenate(([0.0], np.cumsum(seg)))
        self.prefix_lengths.setflags(write=False)
        self.dropped_duplicates = dropped
        self._bbox = (pts.min(axis=0), pts.max(axis=0))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_edges(self) -> int:
        return self.vertices.shape[0] - 1

    @property
    def length(self) -> float:
        return float(self.prefix_lengths[-1])

    @property
    def bbox(self):
        return self._bbox

    def __repr__(self) -> str:
        return (
            f"PolygonalCurve(id={self.curve_id!r}, n={self.n_edges}, d={self.dim})"
        )

    # -- parameter helpers -------------------------------------------------

    def start_param(self) -> CurveParam:
        return CurveParam(1, 0.0)

    def end_param(self) -> CurveParam:
        return CurveParam(self.n_edges, 1.0)

    def check_param(self, p: CurveParam) -> CurveParam:
        return canonical(p, self.n_edges)

    def global_fraction(self, p: CurveParam) -> float:
        """Uniform per-edge fraction in [0, 1] (matches the free-space grid)."""
        return self.check_param(p).to_grid() / self.n_edges

    def param_from_fraction(self, f: float) -> CurveParam:
        return param_from_grid(f * self.n_edges, self.n_edges)

    def arclen_at(self, p: CurveParam) -> float:
        """Arc length from the start of the curve to ``p``."""
        p = self.check_param(p)
        e = p.edge - 1
        return float(
            self.prefix_lengths[e]
            + p.t * (self.prefix_lengths[e + 1] - self.prefix_lengths[e])
        )

    def arclen_at_grid(self, g) -> np.ndarray:
        """Vectorized grid coordinate -> arc length (piecewise linear)."""
        n = self.n_edges
        return np.interp(np.asarray(g, dtype=float), np.arange(n + 1), self.prefix_lengths)

    def param_at_arclen(self, s: float) -> CurveParam:
        s = min(max(s, 0.0), self.length)
        e = int(np.searchsorted(self.prefix_lengths, s, side="right")) - 1
        e = min(max(e, 0), self.n_edges - 1)
        seg = self.prefix_lengths[e + 1] - self.prefix_lengths[e]
        t = (s - self.prefix_lengths[e]) / seg
        return param_from_grid(e + t, self.n_edges)


class Subcurve(NamedTuple):
    """A forward subcurve of a parent curve, identified by id and parameters."""

    curve_id: str
    start: CurveParam
    end: CurveParam


def eval_param(curve: PolygonalCurve, p: CurveParam) -> np.ndarray:
    """Point on the curve at parameter p: (1-t) * v_{edge-1} + t * v_edge."""
    p = curve.check_param(p)
    v = curve.vertices
    return (1.0 - p.t) * v[p.edge - 1] + p.t * v[p.edge]


def eval_grid(curve: PolygonalCurve, g: float) -> np.ndarray:
    return eval_param(curve, param_from_grid(g, curve.n_edges))


def arc_length_between(curve: PolygonalCurve, a: CurveParam, b: CurveParam) -> float:
    """Euclidean arc length of the subcurve from a to b (a <= b)."""
    a = curve.check_param(a)
    b = curve.check_param(b)
    if a > b:
        raise ParameterError(f"start {a} after end {b}")
    return curve.arclen_at(b) - curve.arclen_at(a)


def extract_subcurve(
    curve: PolygonalCurve, a: CurveParam, b: CurveParam
) -> PolygonalCurve:
    """New curve consisting of eval(a), the interior vertices, and eval(b)."""
    a = curve.check_param(a)
    b = curve.check_param(b)
    if a > b:
        raise ParameterError(f"start {a} after end {b}")
    ga, gb = a.to_grid(), b.to_grid()
    if gb - ga <= COORD_TOL:
        raise DegenerateSubcurveError(f"subcurve [{a}, {b}] has zero length")
    first = int(math.floor(ga)) + 1
    last = int(math.ceil(gb)) - 1
    pieces = [eval_param(curve, a)[None, :]]
    if last >= first:
        pieces.append(curve.vertices[first : last + 1])
    pieces.append(eval_param(curve, b)[None, :])
    return PolygonalCurve(np.concatenate(pieces, axis=0), curve_id=curve.curve_id)


# -- discrete Frechet oracle ----------------------------------------------


@_njit(cache=True)
def _dfrechet_dp(dist: np.ndarray) -> float:  # pragma: no cover - jitted
    n, m = dist.shape
    row = np.empty(m, dtype=np.float64)
    row[0] = dist[0, 0]
    for j in range(1, m):
        row[j] = max(row[j - 1], dist[0, j])
    for i in range(1, n):
        prev_diag = row[0]
        row[0] = max(row[0], dist[i, 0])
        for j in range(1, m):
            tmp = row[j]
            best = min(prev_diag, row[j - 1], row[j])
            row[j] = max(best, dist[i, j])
            prev_diag = tmp
    return row[m - 1]


def discrete_frechet(P, Q) -> float:
    """Coupling distance of two point sequences (standard dynamic program).

    Used as a dense-sampling oracle for the continuous decision; symmetric,
    zero iff the sequences are pointwise equal.
    """
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    if P.shape[0] == 0 or Q.shape[0] == 0:
        raise ParameterError("discrete_frechet requires non-empty point lists")
    if P.shape[1] != Q.shape[1]:
        raise ParameterError("dimension mismatch")
    diff = P[:, None, :] - Q[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return float(_dfrechet_dp(dist))


def sample_curve(curve: PolygonalCurve, spacing: float) -> np.ndarray:
    """Vertices plus extra samples so consecutive points are <= spacing apart."""
    out = []
    v = curve.vertices
    for i in range(curve.n_edges):
        seg = v[i + 1] - v[i]
        ln = float(np.linalg.norm(seg))
        k = max(1, int(math.ceil(ln / spacing)))
        ts = np.arange(k) / k
        out.append(v[i] + ts[:, None] * seg)
    out.append(v[-1:])
    return np.concatenate(out, axis=0)


def point_to_curve_distance(point: np.ndarray, curve: PolygonalCurve) -> float:
    """max over the curve of the distance to ``point`` (Frechet to a point)."""
    return float(np.max(np.linalg.norm(curve.vertices - point[None, :], axis=1)))


def bboxes_within(c1: PolygonalCurve, c2: PolygonalCurve, delta: float) -> bool:
    """False guarantees every pointwise distance between the curves > delta."""
    lo1, hi1 = c1.bbox
    lo2, hi2 = c2.bbox
    gap = np.maximum(lo2 - hi1, lo1 - hi2)
    gap = np.maximum(gap, 0.0)
    return float(np.linalg.norm(gap)) <= delta
