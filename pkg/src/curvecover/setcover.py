"""Greedy set cover over arc-length interval systems.

The ground set is the union of the simplified curves' parameter spaces,
measured in arc length.  Each candidate covers a CoverageSet; the greedy
rule picks the candidate with the largest marginal gain, implemented lazily:
stale heap entries are re-evaluated only when they surface.  Ties break on
the smaller candidate id, which makes runs reproducible.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .coverage import CoverageSet
from .geometry import PolygonalCurve

GAIN_EPS = 1e-9


class UncoverableError(RuntimeError):
    """Full coverage was requested but some point is covered by no candidate."""

    def __init__(self, curve_id, position: float):
        self.curve_id = curve_id
        self.position = position
        super().__init__(
            f"no candidate covers curve {curve_id!r} at arc length {position:.6g}"
        )


def build_ground_set(simplifications: list[PolygonalCurve]) -> CoverageSet:
    """Ground set: the full arc-length extent of every simplification."""
    return CoverageSet(
        {S.curve_id: np.array([[0.0, S.length]]) for S in simplifications}
    )


def marginal_gain(cov: CoverageSet, covered: CoverageSet) -> float:
    return cov.subtract(covered).total_length


@dataclass
class GreedyStep:
    cand_id: int
    gain: float
    covered_length: float  # cumulative, after this pick


@dataclass
class Solution:
    selected: list[int] = field(default_factory=list)
    steps: list[GreedyStep] = field(default_factory=list)
    covered: CoverageSet = field(default_factory=CoverageSet)
    uncovered: CoverageSet = field(default_factory=CoverageSet)
    ground_length: float = 0.0
    stop_reason: str = ""

    @property
    def k(self) -> int:
        return len(self.selected)

    @property
    def covered_fraction(self) -> float:
        if self.ground_length <= 0:
            return 1.0
        return self.covered.total_length / self.ground_length


def _first_point(cov: CoverageSet):
    cid = min(cov.intervals)
    return cid, float(cov.intervals[cid][0, 0])


def greedy_cover(
    ground: CoverageSet,
    coverages: Mapping[int, CoverageSet],
    target_fraction: float = 1.0,
    max_rounds: int | None = None,
    clip: bool = True,
) -> Solution:
    """Lazy greedy cover of ``ground`` by the candidate coverage sets.

    Stops at full coverage (up to GAIN_EPS slack), at ``target_fraction`` of
    the ground length, or after ``max_rounds`` picks.  Raises
    UncoverableError when full coverage is requested but no remaining
    candidate has positive gain.  ``clip=False`` skips restricting the
    candidates to the ground set; pass it when they are subsets by
    construction.
    """
    if not 0.0 < target_fraction <= 1.0:
        raise ValueError("target_fraction must be in (0, 1]")
    total = ground.total_length
    eps = GAIN_EPS * max(1.0, total)
    sol = Solution(ground_length=total)
    uncovered = ground

    if clip:
        # restrict every candidate to the ground set once; gains then exact
        clipped = {
            cid: ground.subtract(ground.subtract(cov))
            for cid, cov in coverages.items()
        }
    else:
        clipped = dict(coverages)
    heap = [(-cov.total_length, cid) for cid, cov in clipped.items()]
    heapq.heapify(heap)

    while uncovered.total_length > eps:
        if sol.covered.total_length >= target_fraction * total - eps:
            sol.stop_reason = "target-fraction"
            break
        if max_rounds is not None and len(sol.selected) >= max_rounds:
            sol.stop_reason = "max-rounds"
            break
        best = None
        while heap:
            neg_gain, cid = heapq.heappop(heap)
            gain = marginal_gain(clipped[cid], sol.covered)
            if gain <= eps:
                continue
            if not heap or gain >= -heap[0][0] - eps / 2:
                best = (cid, gain)
                break
            heapq.heappush(heap, (-gain, cid))
        if best is None:
            if target_fraction >= 1.0:
                cid, pos = _first_point(uncovered)
                raise UncoverableError(cid, pos)
            sol.stop_reason = "exhausted"
            break
        cid, gain = best
        sol.selected.append(cid)
        sol.covered = sol.covered.union(clipped[cid])
        uncovered = ground.subtract(sol.covered)
        sol.steps.append(GreedyStep(cid, gain, sol.covered.total_length))
    else:
        sol.stop_reason = "full-coverage"
    sol.uncovered = uncovered
    return sol


def independent_set_lower_bound(
    ground: CoverageSet, coverages: Mapping[int, CoverageSet]
) -> int:
    """Number of ground points no two of which share a covering candidate.

    Any cover needs one candidate per such point, so this bounds the optimum
    from below.  Points are probed at the midpoints of the elementary pieces
    induced by all coverage interval endpoints, sweeping left to right and
    accepting a point when its candidate set is disjoint from those already
    used.  Uncoverable points are skipped.
    """
    used: set[int] = set()
    count = 0
    for cid_curve in sorted(ground.intervals, key=lambda c: (c is None, c)):
        cuts = [ground.intervals[cid_curve].ravel()]
        los, his, ids = [], [], []
        for cand_id, cov in coverages.items():
            arr = cov.intervals.get(cid_curve)
            if arr is not None and arr.size:
                cuts.append(arr.ravel())
                los.append(arr[:, 0])
                his.append(arr[:, 1])
                ids.extend([cand_id] * len(arr))
        xs = np.unique(np.concatenate(cuts))
        mids = (xs[:-1] + xs[1:]) / 2.0
        # keep midpoints inside the ground set
        g = ground.intervals[cid_curve]
        inside = np.zeros(len(mids), dtype=bool)
        for lo, hi in g:
            inside |= (mids > lo) & (mids < hi)
        mids = mids[inside]
        if not los or not len(mids):
            continue
        # sweep left to right, maintaining the set of stabbing candidates
        los = np.concatenate(los)
        his = np.concatenate(his)
        ids = np.asarray(ids)
        by_lo = np.argsort(los, kind="stable")
        by_hi = np.argsort(his, kind="stable")
        active: dict[int, int] = {}  # cand_id -> open interval count
        ai = bi = 0
        for x in mids:
            while ai < len(by_lo) and los[by_lo[ai]] <= x:
                cid = int(ids[by_lo[ai]])
                active[cid] = active.get(cid, 0) + 1
                ai += 1
            while bi < len(by_hi) and his[by_hi[bi]] < x:
                cid = int(ids[by_hi[bi]])
                active[cid] -= 1
                if active[cid] == 0:
                    del active[cid]
                bi += 1
            if active and not (active.keys() & used):
                used.update(active.keys())
                count += 1
    return count
