"""End-to-end subtrajectory clustering.

Phases: simplify every input curve, build pairwise free spaces at the
coverage radius, collect extremal coordinates, enumerate candidate
subcurves, compute each candidate's coverage of all simplifications, then
run the arc-length greedy set cover.  Deterministic for a fixed config and
input set: curves are processed in curve-id order and all tie-breaks are
explicit.

``delta_simp`` is the simplification error budget: the simplifier runs at
parameter delta_simp / 3, whose shortcut guarantee is 3x the parameter.
``delta_free`` is the Frechet radius used for coverage.  The theory-faithful
pairing for a base radius delta is (3 * delta, 8 * delta); a covered
interval then maps back to a subcurve of the original within 11 * delta of
its center.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    CurveParam,
    ParameterError,
    PolygonalCurve,
    extract_subcurve,
    param_from_grid,
)
from .simplification import Simplification, delta_good_simplify
from .candidates import (
    Candidate,
    collect_extremal_coordinates,
    enumerate_candidates,
)
from .coverage import CoverageSet, PairCoverage, compute_coverage, params_to_arclen
from .setcover import (
    Solution,
    build_ground_set,
    greedy_cover,
    independent_set_lower_bound,
)


@dataclass(frozen=True)
class ClusteringConfig:
    """Knobs of the clustering pipeline; see the module docstring."""

    delta_simp: float
    delta_free: float
    l: int = 8
    target_fraction: float = 1.0
    max_rounds: int | None = None
    theoretical_candidates: bool = False
    prefilter: bool = True
    verify_extremals: bool = False
    compute_lower_bound: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.delta_simp <= 0 or self.delta_free <= 0:
            raise ValueError("delta_simp and delta_free must be > 0")
        if self.l < 1:
            raise ValueError("l must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.delta_free < self.delta_simp:
            warnings.warn(
                "delta_free < delta_simp: simplification error exceeds the "
                "coverage radius; results may be vacuous",
                stacklevel=2,
            )

    @classmethod
    def theory(cls, delta: float, **kw) -> "ClusteringConfig":
        """The 3:8 setting giving the 11x guarantee at base radius delta."""
        return cls(delta_simp=3.0 * delta, delta_free=8.0 * delta, **kw)

    @property
    def simplify_param(self) -> float:
        return self.delta_simp / 3.0


@dataclass(frozen=True)
class Cluster:
    """One selected center with its marginal gain and coverage."""

    rank: int
    candidate: Candidate
    gain: float
    coverage: CoverageSet


@dataclass
class ClusteringResult:
    config: ClusteringConfig
    curve_ids: list[str]
    simplifications: list[Simplification]
    n_candidates: int
    clusters: list[Cluster]
    covered: CoverageSet
    uncovered: CoverageSet
    ground_length: float
    stop_reason: str
    lower_bound: int | None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.clusters)

    @property
    def covered_fraction(self) -> float:
        if self.ground_length <= 0:
            return 1.0
        return self.covered.total_length / self.ground_length

    @property
    def approx_ratio(self) -> float | None:
        if not self.lower_bound:
            return None
        return self.k / self.lower_bound


def candidate_coverage(
    cand: Candidate,
    simplifications: list[PolygonalCurve],
    delta: float,
    prefilter: bool = True,
) -> CoverageSet:
    """Arc-length coverage of one candidate across all simplifications."""
    source = simplifications[cand.curve_pos]
    sub = extract_subcurve(source, cand.start, cand.end)
    out: dict[str, np.ndarray] = {}
    for S in simplifications:
        ivs = compute_coverage(sub, S, delta)
        if ivs:
            out[S.curve_id] = params_to_arclen(S, ivs)
    return CoverageSet(out)


def _coverage_phase(
    cands: list[Candidate],
    simplifications: list[PolygonalCurve],
    config: "ClusteringConfig",
) -> dict[int, CoverageSet]:
    """Coverage of every candidate, batched per (source, target) curve pair
    so each pair's free space is solved only once (see PairCoverage)."""
    from .geometry import bboxes_within

    groups: dict[int, list[Candidate]] = {}
    for c in cands:
        groups.setdefault(c.curve_pos, []).append(c)

    raw: dict[int, dict[str, list]] = {c.cand_id: {} for c in cands}

    def run_source(src_pos: int) -> None:
        src = simplifications[src_pos]
        mine = groups[src_pos]
        spans = [(c.start.to_grid(), c.end.to_grid()) for c in mine]
        # bounding box of every candidate subcurve, for cheap target culling
        v = src.vertices
        box_lo = np.empty((len(mine), src.dim))
        box_hi = np.empty((len(mine), src.dim))
        for k, (ga, gb) in enumerate(spans):
            i0, i1 = int(math.floor(ga)), int(math.ceil(gb))
            pts = v[i0 : i1 + 1]
            box_lo[k] = pts.min(axis=0)
            box_hi[k] = pts.max(axis=0)
        for tgt in simplifications:
            if config.prefilter and not bboxes_within(src, tgt, config.delta_free):
                continue
            if config.prefilter:
                tlo, thi = tgt.bbox
                gap = np.maximum(
                    np.maximum(tlo[None, :] - box_hi, box_lo - thi[None, :]), 0.0
                )
                near = np.einsum("kd,kd->k", gap, gap) <= config.delta_free**2
                if not near.any():
                    continue
            else:
                near = np.ones(len(mine), dtype=bool)
            pc = PairCoverage(tgt, src, config.delta_free)
            for k in np.nonzero(near)[0]:
                c = mine[k]
                runs = pc.coverage_grid(*spans[k])
                if runs:
                    arr = tgt.arclen_at_grid(np.asarray(runs))
                    raw[c.cand_id].setdefault(tgt.curve_id, []).append(arr)

    positions = sorted(groups)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as ex:
            list(ex.map(run_source, positions))
    else:
        for pos in positions:
            run_source(pos)

    return {
        cand_id: CoverageSet(
            {cid: np.concatenate(parts, axis=0) for cid, parts in per.items()}
        )
        for cand_id, per in raw.items()
    }


def _prepare_curves(curves: list[PolygonalCurve]) -> list[PolygonalCurve]:
    prepared = []
    for i, c in enumerate(curves):
        if c.curve_id is None:
            c = PolygonalCurve(c.vertices, curve_id=f"curve{i}")
        prepared.append(c)
    ids = [c.curve_id for c in prepared]
    if len(set(ids)) != len(ids):
        dupes = sorted({x for x in ids if ids.count(x) > 1})
        raise ParameterError(f"duplicate curve ids: {dupes}")
    prepared.sort(key=lambda c: c.curve_id)
    return prepared


def cluster(
    curves: list[PolygonalCurve], config: ClusteringConfig
) -> ClusteringResult:
    """Run the full pipeline and return the selected centers."""
    if not curves:
        raise ParameterError("no input curves")
    timings: dict[str, float] = {}
    t_total = time.perf_counter()

    curves = _prepare_curves(curves)

    t0 = time.perf_counter()
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as ex:
            simps = list(
                ex.map(lambda c: delta_good_simplify(c, config.simplify_param), curves)
            )
    else:
        simps = [delta_good_simplify(c, config.simplify_param) for c in curves]
    S_list = [s.curve for s in simps]
    timings["simplify"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    index = collect_extremal_coordinates(
        S_list,
        config.delta_free,
        prefilter=config.prefilter,
        verify_membership=config.verify_extremals,
    )
    timings["extremal_index"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cands = enumerate_candidates(
        index, S_list, config.l, theoretical=config.theoretical_candidates
    )
    timings["candidates"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    coverages = _coverage_phase(cands, S_list, config)
    timings["coverage"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    ground = build_ground_set(S_list)
    sol = greedy_cover(
        ground,
        coverages,
        target_fraction=config.target_fraction,
        max_rounds=config.max_rounds,
        clip=False,  # coverages live on the simplifications already
    )
    timings["setcover"] = time.perf_counter() - t0

    lb = None
    if config.compute_lower_bound:
        t0 = time.perf_counter()
        lb = independent_set_lower_bound(ground, coverages)
        timings["lower_bound"] = time.perf_counter() - t0

    by_id = {c.cand_id: c for c in cands}
    clusters = [
        Cluster(r, by_id[st.cand_id], st.gain, coverages[st.cand_id])
        for r, st in enumerate(sol.steps)
    ]
    timings["total"] = time.perf_counter() - t_total
    return ClusteringResult(
        config=config,
        curve_ids=[c.curve_id for c in curves],
        simplifications=simps,
        n_candidates=len(cands),
        clusters=clusters,
        covered=sol.covered,
        uncovered=sol.uncovered,
        ground_length=ground.total_length,
        stop_reason=sol.stop_reason,
        lower_bound=lb,
        timings=timings,
    )


# -- mapping covered intervals back to the original curves ------------------


def map_to_original(
    simp: Simplification,
    original: PolygonalCurve,
    start: CurveParam,
    end: CurveParam,
    error: float,
) -> tuple[CurveParam, CurveParam] | None:
    """Interval on the original curve within Frechet distance ``error`` of the
    simplification subcurve [start, end], found via the free-space sweep.

    With ``error`` at least the simplification error budget a matching
    interval always exists; the longest one is returned.
    """
    sub = extract_subcurve(simp.curve, start, end)
    ivs = compute_coverage(sub, original, error)
    if not ivs:
        return None
    return max(ivs, key=lambda iv: iv[1].to_grid() - iv[0].to_grid())


def expand_to_vertex_boundaries(
    curve: PolygonalCurve, a: CurveParam, b: CurveParam
) -> tuple[CurveParam, CurveParam]:
    """Round an interval outwards to the enclosing vertex parameters."""
    ga = math.floor(a.to_grid())
    gb = math.ceil(b.to_grid())
    return param_from_grid(ga, curve.n_edges), param_from_grid(gb, curve.n_edges)


def source_vertex_span(
    simp: Simplification, start: CurveParam, end: CurveParam
) -> tuple[int, int]:
    """Original vertex index range spanned by a simplification interval."""
    lo = int(math.floor(start.to_grid()))
    hi = int(math.ceil(end.to_grid()))
    src = simp.source_indices
    return int(src[lo]), int(src[hi])
