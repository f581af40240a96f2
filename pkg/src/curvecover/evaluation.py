"""Frame labeling from cluster centers and classification metrics.

Frames are the vertices of the original (high-dimensional) pose curve.
Each selected center receives the majority ground-truth label over the
frames its coverage spans; a frame claimed by centers with two or more
distinct labels is marked "transition", an unclaimed frame "uncovered".
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .pipeline import ClusteringResult, source_vertex_span

TRANSITION = "transition"
UNCOVERED = "uncovered"


@dataclass
class Labeling:
    labels: list[str]
    center_labels: list[str]  # per cluster, in solution order


@dataclass
class Metrics:
    accuracy: float
    macro_precision: float
    macro_recall: float


def _cluster_frame_sets(result: ClusteringResult) -> list[set[int]]:
    """Frame indices spanned by each cluster's coverage, expanded to the
    original-vertex range of every covered simplification interval."""
    simp_by_id = {s.curve.curve_id: s for s in result.simplifications}
    out = []
    for cl in result.clusters:
        frames: set[int] = set()
        for cid, arr in cl.coverage.intervals.items():
            simp = simp_by_id[cid]
            for lo, hi in arr:
                a = simp.curve.param_at_arclen(float(lo))
                b = simp.curve.param_at_arclen(float(hi))
                v0, v1 = source_vertex_span(simp, a, b)
                frames.update(range(v0, v1 + 1))
        out.append(frames)
    return out


def assign_labels(result: ClusteringResult, truth: list[str]) -> Labeling:
    """Label every frame from the centers covering it; see module docstring."""
    if len(result.curve_ids) != 1:
        raise ValueError("labeling expects a single pose curve")
    frame_sets = _cluster_frame_sets(result)
    max_frame = max((max(fs) for fs in frame_sets if fs), default=-1)
    if max_frame >= len(truth):
        raise ValueError(
            f"ground truth has {len(truth)} frames but coverage reaches "
            f"frame {max_frame}"
        )
    center_labels = []
    for fs in frame_sets:
        counts = Counter(truth[f] for f in sorted(fs))
        best = min(
            counts.items(), key=lambda kv: (-kv[1], kv[0])
        )  # majority, ties lexicographic
        center_labels.append(best[0])

    labels = []
    for f in range(len(truth)):
        owners = {lab for lab, fs in zip(center_labels, frame_sets) if f in fs}
        if not owners:
            labels.append(UNCOVERED)
        elif len(owners) == 1:
            labels.append(next(iter(owners)))
        else:
            labels.append(TRANSITION)
    return Labeling(labels=labels, center_labels=center_labels)


def metrics(pred: list[str], truth: list[str]) -> Metrics:
    """Accuracy and unweighted macro precision/recall over all classes that
    occur in either sequence ("transition" counts as its own class)."""
    if len(pred) != len(truth):
        raise ValueError(f"length mismatch: {len(pred)} predicted vs {len(truth)} truth")
    n = len(truth)
    acc = sum(p == t for p, t in zip(pred, truth)) / n
    classes = sorted(set(truth) | set(pred))
    precisions, recalls = [], []
    for c in classes:
        tp = sum(p == c and t == c for p, t in zip(pred, truth))
        fp = sum(p == c and t != c for p, t in zip(pred, truth))
        fn = sum(p != c and t == c for p, t in zip(pred, truth))
        precisions.append(tp / (tp + fp) if tp + fp else 0.0)
        recalls.append(tp / (tp + fn) if tp + fn else 0.0)
    return Metrics(
        accuracy=acc,
        macro_precision=sum(precisions) / len(classes),
        macro_recall=sum(recalls) / len(classes),
    )


@dataclass
class ApproximationReport:
    k: int
    lower_bound: int
    ratio: float


def approximation_report(result: ClusteringResult) -> ApproximationReport:
    """Greedy size over the independent-set lower bound (>= 1 by construction)."""
    if not result.lower_bound:
        raise ValueError("lower bound missing or zero; rerun with compute_lower_bound")
    return ApproximationReport(
        k=result.k,
        lower_bound=result.lower_bound,
        ratio=result.k / result.lower_bound,
    )
