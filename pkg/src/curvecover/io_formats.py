"""CSV ingestion and JSON/GeoJSON export.

Trajectory CSVs carry one point per row, grouped by a curve id column;
column names are configurable.  Pose CSVs carry one pose per row with 3*J
numeric columns, loaded as a single curve in R^(3J).  Results are exported
as JSON (full precision, deterministic apart from the "meta" section) or as
GeoJSON for planar data.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .geometry import ParameterError, PolygonalCurve, extract_subcurve
from .pipeline import ClusteringResult

EARTH_RADIUS_M = 6371000.0


@dataclass(frozen=True)
class TrajectoryCSVFormat:
    """Column mapping for trajectory CSVs."""

    id_col: str = "id"
    coord_cols: tuple[str, ...] = ("x", "y")
    lonlat: bool = False  # coord_cols are (lon, lat) degrees; project to meters


def equirectangular(lonlat: np.ndarray, origin: np.ndarray | None = None) -> np.ndarray:
    """Degrees (lon, lat) -> planar meters about ``origin`` (default: centroid).

    A documented small-extent approximation; adequate for regional data.
    """
    lonlat = np.asarray(lonlat, dtype=np.float64)
    if origin is None:
        origin = lonlat.mean(axis=0)
    lon0, lat0 = np.radians(origin)
    rad = np.radians(lonlat)
    x = EARTH_RADIUS_M * (rad[:, 0] - lon0) * math.cos(lat0)
    y = EARTH_RADIUS_M * (rad[:, 1] - lat0)
    return np.stack([x, y], axis=1)


def load_trajectories_csv(
    path, fmt: TrajectoryCSVFormat = TrajectoryCSVFormat()
) -> list[PolygonalCurve]:
    """One curve per id, rows in file order; order of first appearance kept.

    Curves that degenerate to fewer than 2 distinct points are skipped with
    a warning; malformed cells raise with row and column named.
    """
    groups: dict[str, list] = {}
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise ParameterError(f"{path}: empty file")
        missing = [
            c for c in (fmt.id_col, *fmt.coord_cols) if c not in reader.fieldnames
        ]
        if missing:
            raise ParameterError(f"{path}: missing columns {missing}")
        for rownum, row in enumerate(reader, start=2):
            cid = row[fmt.id_col]
            pt = []
            for col in fmt.coord_cols:
                try:
                    pt.append(float(row[col]))
                except (TypeError, ValueError):
                    raise ParameterError(
                        f"{path}: non-numeric value {row[col]!r} at row {rownum}, "
                        f"column {col!r}"
                    ) from None
            groups.setdefault(cid, []).append(pt)

    curves = []
    for cid, pts in groups.items():
        pts = np.asarray(pts)
        if fmt.lonlat:
            pts = equirectangular(pts)
        try:
            curves.append(PolygonalCurve(pts, curve_id=cid))
        except ParameterError as exc:
            warnings.warn(f"skipping curve {cid!r}: {exc}", stacklevel=2)
    return curves


def load_pose_csv(path) -> PolygonalCurve:
    """Single curve in R^(3J); one pose per row, 3*J numeric columns.

    A non-numeric first row is treated as a header.
    """
    rows = []
    with open(path, newline="") as f:
        for rownum, row in enumerate(csv.reader(f), start=1):
            if not row:
                continue
            try:
                vals = [float(x) for x in row]
            except ValueError:
                if rownum == 1:
                    continue  # header
                raise ParameterError(
                    f"{path}: non-numeric cell at row {rownum}"
                ) from None
            if rows and len(vals) != len(rows[0]):
                raise ParameterError(
                    f"{path}: ragged row {rownum}: {len(vals)} columns, "
                    f"expected {len(rows[0])}"
                )
            rows.append(vals)
    if not rows:
        raise ParameterError(f"{path}: no data rows")
    if len(rows[0]) % 3 != 0:
        raise ParameterError(
            f"{path}: {len(rows[0])} columns is not divisible by 3"
        )
    return PolygonalCurve(np.asarray(rows), curve_id="pose")


def load_ground_truth_csv(path) -> list[str]:
    """Sidecar ground truth: columns frame_index, label; returns labels in
    frame order."""
    pairs = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or not {
            "frame_index",
            "label",
        } <= set(reader.fieldnames):
            raise ParameterError(f"{path}: expected columns frame_index, label")
        for rownum, row in enumerate(reader, start=2):
            try:
                pairs.append((int(row["frame_index"]), row["label"]))
            except (TypeError, ValueError):
                raise ParameterError(
                    f"{path}: bad frame_index at row {rownum}"
                ) from None
    pairs.sort()
    return [lab for _, lab in pairs]


# -- result export -----------------------------------------------------------


def _param_dict(curve: PolygonalCurve, p) -> dict:
    return {
        "edge": p.edge,
        "t": p.t,
        "fraction": curve.global_fraction(p),
        "arclen": curve.arclen_at(p),
    }


def result_to_dict(result: ClusteringResult) -> dict:
    """JSON-ready dict; everything outside "meta" is deterministic."""
    simp_by_id = {s.curve.curve_id: s for s in result.simplifications}
    cfg = result.config
    centers = []
    for cl in result.clusters:
        cand = cl.candidate
        source = simp_by_id[cand.curve_id].curve
        sub = extract_subcurve(source, cand.start, cand.end)
        coverage = []
        for cid in sorted(cl.coverage.intervals):
            S = simp_by_id[cid].curve
            for lo, hi in cl.coverage.intervals[cid]:
                coverage.append(
                    {
                        "curve_id": cid,
                        "start": _param_dict(S, S.param_at_arclen(float(lo))),
                        "end": _param_dict(S, S.param_at_arclen(float(hi))),
                    }
                )
        centers.append(
            {
                "rank": cl.rank,
                "cand_id": cand.cand_id,
                "curve_id": cand.curve_id,
                "start": _param_dict(source, cand.start),
                "end": _param_dict(source, cand.end),
                "gain": cl.gain,
                "vertices": sub.vertices.tolist(),
                "coverage": coverage,
            }
        )
    return {
        "meta": {
            "generated_at": datetime.now(timezone.utc).isoformat(),
            "timings": result.timings,
        },
        "result": {
            "config": {
                "delta_simp": cfg.delta_simp,
                "delta_free": cfg.delta_free,
                "l": cfg.l,
                "target_fraction": cfg.target_fraction,
                "max_rounds": cfg.max_rounds,
                "theoretical_candidates": cfg.theoretical_candidates,
            },
            "curves": result.curve_ids,
            "simplifications": [
                {
                    "curve_id": s.curve.curve_id,
                    "n_kept": int(s.n_kept),
                    "source_indices": [int(i) for i in s.source_indices],
                }
                for s in result.simplifications
            ],
            "n_candidates": result.n_candidates,
            "lower_bound": result.lower_bound,
            "ground_length": result.ground_length,
            "covered_fraction": result.covered_fraction,
            "stop_reason": result.stop_reason,
            "centers": centers,
            "trace": [
                {"rank": c.rank, "cand_id": c.candidate.cand_id, "gain": c.gain}
                for c in result.clusters
            ],
        },
    }


def export_result(result: ClusteringResult, path, format: str = "json") -> None:
    """Write the result as JSON or GeoJSON (planar data only)."""
    if format == "json":
        with open(path, "w") as f:
            json.dump(result_to_dict(result), f, indent=1, sort_keys=True)
            f.write("\n")
        return
    if format != "geojson":
        raise ValueError(f"unknown format {format!r}")

    simp_by_id = {s.curve.curve_id: s for s in result.simplifications}
    dim = next(iter(simp_by_id.values())).curve.dim
    if dim != 2:
        raise ParameterError(f"GeoJSON export requires planar curves, got d={dim}")
    features = []
    for cl in result.clusters:
        cand = cl.candidate
        sub = extract_subcurve(
            simp_by_id[cand.curve_id].curve, cand.start, cand.end
        )
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": sub.vertices.tolist(),
                },
                "properties": {"role": "center", "rank": cl.rank, "gain": cl.gain},
            }
        )
        pieces = []
        for cid in sorted(cl.coverage.intervals):
            S = simp_by_id[cid].curve
            for lo, hi in cl.coverage.intervals[cid]:
                a = S.param_at_arclen(float(lo))
                b = S.param_at_arclen(float(hi))
                if b.to_grid() - a.to_grid() > 1e-9:
                    pieces.append(extract_subcurve(S, a, b).vertices.tolist())
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "MultiLineString", "coordinates": pieces},
                "properties": {"role": "coverage", "rank": cl.rank},
            }
        )
    with open(path, "w") as f:
        json.dump({"type": "FeatureCollection", "features": features}, f, indent=1)
        f.write("\n")


def load_result(path) -> dict:
    with open(path) as f:
        return json.load(f)
