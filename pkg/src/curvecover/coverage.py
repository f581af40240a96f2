"""Coverage of a center curve on target curves as disjoint interval unions.

The coverage of a center C on a target P at threshold delta is the union of
all parameter intervals [a, b] of P with d_F(P[a,b], C) <= delta.  It is
computed from the free-space diagram of (P, C): a backward sweep yields the
co-reachable start runs on the bottom line, a forward sweep from each run's
right end yields the furthest reachable end on the top line.

Interval bookkeeping uses arc-length coordinates per curve; touching
intervals are merged and slivers below MERGE_TOL are dropped.
"""

from __future__ import annotations

import math
from collections import OrderedDict

import numpy as np

from .geometry import (
    CurveParam,
    PolygonalCurve,
    _njit,
    bboxes_within,
    eval_grid,
    param_from_grid,
)
from .freespace import SNAP, FreeSpaceDiagram, _solve_free_intervals

MERGE_TOL = 1e-9


# -- interval sets -----------------------------------------------------------


def normalize_intervals(ivs) -> np.ndarray:
    """Sort, merge touching, drop slivers; returns an (k, 2) array."""
    arr = np.asarray(ivs, dtype=np.float64).reshape(-1, 2)
    if arr.size == 0:
        return arr.reshape(0, 2)
    arr = arr[np.argsort(arr[:, 0], kind="stable")]
    out = []
    cur_lo, cur_hi = arr[0]
    for lo, hi in arr[1:]:
        if lo <= cur_hi + MERGE_TOL:
            cur_hi = max(cur_hi, hi)
        else:
            out.append((cur_lo, cur_hi))
            cur_lo, cur_hi = lo, hi
    out.append((cur_lo, cur_hi))
    res = np.array([iv for iv in out if iv[1] - iv[0] >= MERGE_TOL], dtype=np.float64)
    return res.reshape(-1, 2)


def _subtract_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Set difference a \\ b for normalized interval arrays."""
    if a.size == 0 or b.size == 0:
        return a.copy()
    out = []
    bi = 0
    for lo, hi in a:
        cur = lo
        while bi < len(b) and b[bi][1] <= cur:
            bi += 1
        bj = bi
        while bj < len(b) and b[bj][0] < hi:
            blo, bhi = b[bj]
            if blo > cur:
                out.append((cur, min(blo, hi)))
            cur = max(cur, bhi)
            if cur >= hi:
                break
            bj += 1
        if cur < hi:
            out.append((cur, hi))
    return normalize_intervals(out) if out else np.empty((0, 2))


class CoverageSet:
    """Per-curve sorted disjoint closed intervals in arc-length coordinates."""

    __slots__ = ("intervals", "_total")

    def __init__(self, intervals: dict[str, np.ndarray] | None = None):
        self.intervals: dict[str, np.ndarray] = {}
        if intervals:
            for cid, arr in intervals.items():
                arr = normalize_intervals(arr)
                if arr.size:
                    self.intervals[cid] = arr
        self._total = sum(
            float(np.sum(a[:, 1] - a[:, 0])) for a in self.intervals.values()
        )

    @property
    def total_length(self) -> float:
        return self._total

    def is_empty(self) -> bool:
        return not self.intervals

    def union(self, other: "CoverageSet") -> "CoverageSet":
        merged: dict[str, np.ndarray] = {}
        for cid in set(self.intervals) | set(other.intervals):
            parts = []
            if cid in self.intervals:
                parts.append(self.intervals[cid])
            if cid in other.intervals:
                parts.append(other.intervals[cid])
            merged[cid] = np.concatenate(parts, axis=0)
        return CoverageSet(merged)

    def subtract(self, other: "CoverageSet") -> "CoverageSet":
        out: dict[str, np.ndarray] = {}
        for cid, arr in self.intervals.items():
            if cid in other.intervals:
                diff = _subtract_arrays(arr, other.intervals[cid])
                if diff.size:
                    out[cid] = diff
            else:
                out[cid] = arr
        return CoverageSet(out)

    def __repr__(self) -> str:
        return f"CoverageSet(curves={len(self.intervals)}, length={self._total:.6g})"


def union_length(cov: CoverageSet) -> float:
    """Total arc length of the covered intervals."""
    return cov.total_length


def subtract(cov: CoverageSet, other: CoverageSet) -> CoverageSet:
    return cov.subtract(other)


# -- reachability sweeps -----------------------------------------------------


@_njit(cache=True, nogil=True)
def _sweep_top(hl, hh, vl, vh, src_lo, src_hi, out_lo, out_hi):  # pragma: no cover
    """Reachable top-line intervals from bottom-line sources in [src_lo,
    src_hi]; writes (lo, hi) pairs in global grid coordinates, returns count.

    hl/hh: (n, m+1) horizontal boundary intervals, vl/vh: (n+1, m) vertical,
    NaN marking empty (the FreeSpaceDiagram layout).
    """
    n = hl.shape[0]
    m = hl.shape[1] - 1

    # reachable bottom-line set, walking right within free runs from sources;
    # only the left end of each reach interval matters downstream
    b_lo = np.empty(n)
    b_has = np.zeros(n, np.bool_)
    prev_connects = False
    cur_start = np.nan
    for i in range(n):
        lo = hl[i, 0]
        hi = hh[i, 0]
        if math.isnan(lo):
            prev_connects = False
            cur_start = np.nan
            continue
        if not (prev_connects and lo == 0.0):
            cur_start = np.nan
        glo = i + lo
        ghi = i + hi
        if math.isnan(cur_start):
            s0 = max(glo, src_lo)
            if s0 <= min(ghi, src_hi):
                cur_start = s0
        if not math.isnan(cur_start) and cur_start <= ghi:
            b_has[i] = True
            b_lo[i] = max(glo, cur_start)
        prev_connects = hi == 1.0

    # climb the left column only from a reachable bottom-left corner
    open_run = b_has[0] and b_lo[0] <= 0.0
    for j in range(m):
        if open_run and not math.isnan(vl[0, j]) and vl[0, j] == 0.0:
            L_has = True
            L_lo = j + vl[0, j]
            open_run = vh[0, j] == 1.0
        else:
            L_has = False
            L_lo = 0.0
            open_run = False
        for i in range(n):
            bottom_has = b_has[i]
            bottom_lo = b_lo[i]
            left_has = L_has
            left_lo = L_lo
            R_has = False
            R_lo = 0.0
            T_has = False
            T_lo = 0.0
            if bottom_has or left_has:
                rlo = vl[i + 1, j]
                if not math.isnan(rlo):
                    grlo = j + rlo
                    grhi = j + vh[i + 1, j]
                    if bottom_has:
                        R_has = True
                        R_lo = grlo
                    elif left_lo <= grhi:
                        R_has = True
                        R_lo = max(grlo, left_lo)
                tlo = hl[i, j + 1]
                if not math.isnan(tlo):
                    gtlo = i + tlo
                    gthi = i + hh[i, j + 1]
                    if left_has:
                        T_has = True
                        T_lo = gtlo
                    elif bottom_lo <= gthi:
                        T_has = True
                        T_lo = max(gtlo, bottom_lo)
            b_has[i] = T_has
            b_lo[i] = T_lo
            L_has = R_has
            L_lo = R_lo

    # extend reached top-line intervals rightwards along free runs
    run_end = np.empty(n)
    nxt = np.nan
    for i in range(n - 1, -1, -1):
        lo = hl[i, m]
        hi = hh[i, m]
        if math.isnan(lo):
            nxt = np.nan
            run_end[i] = np.nan
        else:
            if hi == 1.0 and not math.isnan(nxt):
                run_end[i] = nxt
            else:
                run_end[i] = i + hi
            nxt = run_end[i] if lo == 0.0 else np.nan
    count = 0
    for i in range(n):
        if b_has[i]:
            out_lo[count] = b_lo[i]
            out_hi[count] = run_end[i]
            count += 1
    return count


def _reach_arrays(hl, hh, vl, vh, src_lo: float, src_hi: float):
    n = hl.shape[0]
    out_lo = np.empty(n)
    out_hi = np.empty(n)
    cnt = _sweep_top(
        np.ascontiguousarray(hl),
        np.ascontiguousarray(hh),
        np.ascontiguousarray(vl),
        np.ascontiguousarray(vh),
        float(src_lo),
        float(src_hi),
        out_lo,
        out_hi,
    )
    return _merge_float_intervals(
        [(out_lo[i], out_hi[i]) for i in range(cnt)]
    )


def _coverage_runs(hl, hh, vl, vh):
    """Maximal covered intervals [p, e] on the x-axis, in grid coordinates."""
    n = hl.shape[0]
    # backward sweep on the point-reflected diagram gives the co-reachable
    # start runs on the bottom line
    rhl = np.ascontiguousarray(1.0 - hh[::-1, ::-1])
    rhh = np.ascontiguousarray(1.0 - hl[::-1, ::-1])
    rvl = np.ascontiguousarray(1.0 - vh[::-1, ::-1])
    rvh = np.ascontiguousarray(1.0 - vl[::-1, ::-1])
    rev_runs = _reach_arrays(rhl, rhh, rvl, rvh, 0.0, float(n))
    start_runs = sorted((n - hi, n - lo) for lo, hi in rev_runs)
    out = []
    for p, q in start_runs:
        ends = _reach_arrays(hl, hh, vl, vh, q, q)
        if not ends:
            # q co-reachable implies some end is reachable; guard against
            # borderline float disagreement between the two sweeps
            ends = _reach_arrays(hl, hh, vl, vh, p, q)
            if not ends:
                continue
        e_max = max(hi for _, hi in ends)
        out.append((p, max(q, e_max)))
    return _merge_float_intervals(out)


def _reach_top_line(diag: FreeSpaceDiagram, src_lo: float, src_hi: float):
    """Intervals on the top line reachable by monotone paths starting on the
    bottom line at x in [src_lo, src_hi] (global grid coordinates)."""
    return _reach_arrays(
        diag.hor_lo, diag.hor_hi, diag.ver_lo, diag.ver_hi, src_lo, src_hi
    )


def _merge_float_intervals(ivs):
    if not ivs:
        return []
    ivs = sorted(ivs)
    out = [list(ivs[0])]
    for lo, hi in ivs[1:]:
        if lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [tuple(iv) for iv in out]


class DiagramCache:
    """Small LRU cache of (target, center) free-space diagrams."""

    def __init__(self, capacity: int = 256):
        self.capacity = capacity
        self._store: OrderedDict = OrderedDict()

    def diagram(self, target: PolygonalCurve, center: PolygonalCurve, delta: float):
        key = (id(target), id(center), delta)
        if key in self._store:
            self._store.move_to_end(key)
            return self._store[key]
        diag = FreeSpaceDiagram(target, center, delta)
        self._store[key] = diag
        if len(self._store) > self.capacity:
            self._store.popitem(last=False)
        return diag


def compute_coverage(
    center: PolygonalCurve,
    target: PolygonalCurve,
    delta: float,
    cache: DiagramCache | None = None,
) -> list[tuple[CurveParam, CurveParam]]:
    """Maximal intervals [a, b] on the target such that a monotone path runs
    from (a, start-of-center) to (b, end-of-center) in the delta-free space.

    The center is passed as a materialized curve (a subcurve of some
    simplification); the target is swept along the x-axis.
    """
    if not bboxes_within(target, center, delta):
        return []
    if cache is not None:
        diag = cache.diagram(target, center, delta)
    else:
        diag = FreeSpaceDiagram(target, center, delta)
    n = diag.p_edges
    merged = _coverage_runs(diag.hor_lo, diag.hor_hi, diag.ver_lo, diag.ver_hi)
    return [
        (param_from_grid(lo, n), param_from_grid(hi, n)) for lo, hi in merged
    ]


class PairCoverage:
    """Coverage queries of subcurves of one source curve against one target.

    The full (target, source) diagram is solved once; a query for the source
    span [ga, gb] slices the matching rows and only recomputes the two
    fractional boundary rows (fresh horizontal solves at the cut points,
    vertical intervals clipped and rescaled, which is exact because a
    subsegment reparametrizes the same quadratic affinely).
    """

    def __init__(self, target: PolygonalCurve, source: PolygonalCurve, delta: float):
        self.target = target
        self.source = source
        self.delta = float(delta)
        self.diag = FreeSpaceDiagram(target, source, delta)
        self._rows: dict[float, tuple] = {}

    def _hrow(self, g: float):
        """Free intervals along the target at the fixed source point g."""
        row = self._rows.get(g)
        if row is None:
            pt = eval_grid(self.source, g)
            pv = self.target.vertices
            lo, hi = _solve_free_intervals(
                pv[:-1], np.diff(pv, axis=0), pt[None, :], self.delta
            )
            row = (lo[:, 0], hi[:, 0])
            self._rows[g] = row
        return row

    @staticmethod
    def _clip_rescale(lo, hi, t0: float, t1: float):
        """Restrict vertical intervals to [t0, t1] and map onto [0, 1]."""
        span = t1 - t0
        clo = np.maximum(lo, t0)
        chi = np.minimum(hi, t1)
        empty = np.isnan(lo) | (clo > chi)
        clo = (clo - t0) / span
        chi = (chi - t0) / span
        clo = np.where(np.abs(clo) < SNAP, 0.0, clo)
        chi = np.where(np.abs(chi - 1.0) < SNAP, 1.0, chi)
        return np.where(empty, np.nan, clo), np.where(empty, np.nan, chi)

    def band_arrays(self, ga: float, gb: float):
        d = self.diag
        j0 = int(math.floor(ga))
        ta = ga - j0
        j1 = int(math.ceil(gb))
        tb = gb - (j1 - 1)
        r = j1 - j0
        # always copy: the boundary rows are overwritten below and must not
        # leak back into the cached full diagram
        hl = np.ascontiguousarray(d.hor_lo[:, j0 : j1 + 1].copy())
        hh = np.ascontiguousarray(d.hor_hi[:, j0 : j1 + 1].copy())
        vl = np.ascontiguousarray(d.ver_lo[:, j0:j1].copy())
        vh = np.ascontiguousarray(d.ver_hi[:, j0:j1].copy())
        if ta > 0.0:
            hl[:, 0], hh[:, 0] = self._hrow(ga)
        if tb < 1.0:
            hl[:, r], hh[:, r] = self._hrow(gb)
        lo_first = ta if ta > 0.0 else 0.0
        hi_last = tb if tb < 1.0 else 1.0
        if r == 1:
            if lo_first > 0.0 or hi_last < 1.0:
                vl[:, 0], vh[:, 0] = self._clip_rescale(
                    vl[:, 0], vh[:, 0], lo_first, hi_last
                )
        else:
            if lo_first > 0.0:
                vl[:, 0], vh[:, 0] = self._clip_rescale(
                    vl[:, 0], vh[:, 0], lo_first, 1.0
                )
            if hi_last < 1.0:
                vl[:, r - 1], vh[:, r - 1] = self._clip_rescale(
                    vl[:, r - 1], vh[:, r - 1], 0.0, hi_last
                )
        return hl, hh, vl, vh

    def coverage_grid(self, ga: float, gb: float):
        """Covered intervals on the target, in grid coordinates."""
        return _coverage_runs(*self.band_arrays(ga, gb))


def params_to_arclen(curve: PolygonalCurve, ivs) -> np.ndarray:
    """Interval list of CurveParam pairs -> (k, 2) arc-length array."""
    if not ivs:
        return np.empty((0, 2))
    g = np.array([[a.to_grid(), b.to_grid()] for a, b in ivs])
    return curve.arclen_at_grid(g)
