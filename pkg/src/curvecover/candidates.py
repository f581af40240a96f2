"""Candidate subcurve enumeration from extremal free-space coordinates.

Candidates are subcurves of the simplified curves, delimited by coordinates
at which the free space against some other curve attains a per-cell left or
right extremum.  Every simplification vertex (and both endpoints) is added
as a forced coordinate, so that singleton-edge candidates always exist and
the ground set stays coverable.

A pair of coordinates (a, b) becomes a candidate when the number of index
coordinates strictly between them is zero or a power of two, and the
subcurve spans at most ``l`` edges.  The optional theoretical mode restricts
pairs to (left-extremal or forced) starts and (right-extremal or forced)
ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import CurveParam, PolygonalCurve, bboxes_within, param_from_grid
from .freespace import FreeSpaceDiagram, extremal_points

COORD_DEDUP_TOL = 1e-12


@dataclass(frozen=True)
class Candidate:
    """A center subcurve, identified by its source simplification and span."""

    cand_id: int
    curve_pos: int  # position of the source simplification in the input list
    curve_id: str | None
    start: CurveParam
    end: CurveParam
    complexity: int  # number of edges of the extracted subcurve

    def grid_span(self) -> tuple[float, float]:
        return self.start.to_grid(), self.end.to_grid()


class ExtremalCoordinateIndex:
    """Per-curve sorted extremal grid coordinates with start/end role flags."""

    def __init__(self, n_curves: int):
        self._raw: list[list[tuple[float, bool, bool]]] = [[] for _ in range(n_curves)]
        self.coords: list[np.ndarray] = [np.empty(0)] * n_curves
        self.is_start: list[np.ndarray] = [np.empty(0, bool)] * n_curves
        self.is_end: list[np.ndarray] = [np.empty(0, bool)] * n_curves

    def add(self, curve_pos: int, grid_coord: float, side: str) -> None:
        self._raw[curve_pos].append(
            (float(grid_coord), side in ("left", "both"), side in ("right", "both"))
        )

    def finalize(self) -> None:
        """Sort, deduplicate within COORD_DEDUP_TOL, OR the role flags."""
        for pos, raw in enumerate(self._raw):
            if not raw:
                continue
            raw.sort()
            xs, st, en = [], [], []
            for g, s, e in raw:
                if xs and g - xs[-1] <= COORD_DEDUP_TOL:
                    st[-1] |= s
                    en[-1] |= e
                else:
                    xs.append(g)
                    st.append(s)
                    en.append(e)
            self.coords[pos] = np.array(xs)
            self.is_start[pos] = np.array(st, dtype=bool)
            self.is_end[pos] = np.array(en, dtype=bool)
        self._raw = [[] for _ in self._raw]

    def size(self) -> int:
        return sum(len(c) for c in self.coords)


def collect_extremal_coordinates(
    simplifications: list[PolygonalCurve],
    delta: float,
    prefilter: bool = True,
    verify_membership: bool = True,
) -> ExtremalCoordinateIndex:
    """Extremal x-coordinates of every (candidate-source, target) diagram.

    Each unordered pair is built once; the transpose reuses the interval
    data to read off the extremal coordinates of the other curve.  Vertex
    coordinates and curve endpoints are force-included with both roles.
    """
    m = len(simplifications)
    index = ExtremalCoordinateIndex(m)
    for pos, S in enumerate(simplifications):
        for g in range(S.n_edges + 1):
            index.add(pos, float(g), "both")
    for i in range(m):
        for j in range(i, m):
            Si, Sj = simplifications[i], simplifications[j]
            if prefilter and not bboxes_within(Si, Sj, delta):
                continue
            diag = FreeSpaceDiagram(Si, Sj, delta)
            for ep in extremal_points(diag, verify_membership=verify_membership):
                index.add(i, ep.x.to_grid(), ep.side)
            if j != i:
                for ep in extremal_points(diag.transpose(), verify_membership=verify_membership):
                    index.add(j, ep.x.to_grid(), ep.side)
    index.finalize()
    return index


def _span_edges(ga: float, gb: float) -> int:
    """Edge count of the subcurve [ga, gb] after endpoint snapping."""
    lo = math.floor(ga + COORD_DEDUP_TOL)
    hi = math.ceil(gb - COORD_DEDUP_TOL)
    return max(1, int(hi - lo))


def enumerate_candidates(
    index: ExtremalCoordinateIndex,
    simplifications: list[PolygonalCurve],
    l: int,
    theoretical: bool = False,
) -> list[Candidate]:
    """All admissible coordinate pairs as candidates, in deterministic order.

    For a start coordinate the admitted partners are the next coordinate and
    the ones 2^k further along the sorted index, which keeps the candidate
    count near-linear in the index size while preserving the covering
    guarantees of the full pairing.
    """
    if l < 1:
        raise ValueError("maximum candidate complexity l must be >= 1")
    out: list[Candidate] = []
    for pos, S in enumerate(simplifications):
        xs = index.coords[pos]
        st = index.is_start[pos]
        en = index.is_end[pos]
        K = len(xs)
        for a in range(K - 1):
            if theoretical and not st[a]:
                continue
            ga = float(xs[a])
            gap = 1
            b = a + 1
            while b < K:
                gb = float(xs[b])
                if _span_edges(ga, gb) > l:
                    break
                if gb - ga > 1e-9 and not (theoretical and not en[b]):
                    out.append(
                        Candidate(
                            cand_id=-1,
                            curve_pos=pos,
                            curve_id=S.curve_id,
                            start=param_from_grid(ga, S.n_edges),
                            end=param_from_grid(gb, S.n_edges),
                            complexity=_span_edges(ga, gb),
                        )
                    )
                b = a + 1 + gap  # 0, 1, 2, 4, ... coordinates in between
                gap *= 2
    out.sort(key=lambda c: (c.curve_pos, c.start.to_grid(), c.end.to_grid()))
    return [
        Candidate(k, c.curve_pos, c.curve_id, c.start, c.end, c.complexity)
        for k, c in enumerate(out)
    ]
