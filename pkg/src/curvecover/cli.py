"""Command-line driver: simplify | cluster | label | bench.

Exit codes: 0 success, 1 data/runtime error, 2 usage error (argparse).
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from .geometry import ParameterError, PolygonalCurve
from .simplification import delta_good_simplify, SimplificationError
from .pipeline import ClusteringConfig, cluster
from .io_formats import (
    TrajectoryCSVFormat,
    export_result,
    load_ground_truth_csv,
    load_pose_csv,
    load_trajectories_csv,
)
from .evaluation import assign_labels, approximation_report, metrics
from .setcover import UncoverableError
from .synth import drifter_batch


def _add_delta_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta-simp", type=float, help="simplification error budget")
    p.add_argument("--delta-free", type=float, help="coverage Frechet radius")
    p.add_argument(
        "--delta",
        type=float,
        help="base radius; sets delta_simp=3*delta, delta_free=8*delta",
    )
    p.add_argument("-l", "--max-complexity", type=int, default=8,
                   help="max candidate complexity in edges (default 8)")
    p.add_argument("--target-fraction", type=float, default=1.0)
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--theoretical-candidates", action="store_true")


def _add_csv_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--id-col", default="id")
    p.add_argument("--x-col", default="x")
    p.add_argument("--y-col", default="y")
    p.add_argument("--lonlat", action="store_true",
                   help="treat x/y as lon/lat degrees; project to meters")


def _config_from(args) -> ClusteringConfig:
    if args.delta is not None:
        if args.delta_simp is not None or args.delta_free is not None:
            print("error: --delta is exclusive with --delta-simp/--delta-free",
                  file=sys.stderr)
            raise SystemExit(2)
        return ClusteringConfig.theory(
            args.delta,
            l=args.max_complexity,
            target_fraction=args.target_fraction,
            max_rounds=args.max_rounds,
            theoretical_candidates=args.theoretical_candidates,
            workers=args.workers,
        )
    if args.delta_simp is None or args.delta_free is None:
        print("error: provide --delta, or both --delta-simp and --delta-free",
              file=sys.stderr)
        raise SystemExit(2)
    return ClusteringConfig(
        delta_simp=args.delta_simp,
        delta_free=args.delta_free,
        l=args.max_complexity,
        target_fraction=args.target_fraction,
        max_rounds=args.max_rounds,
        theoretical_candidates=args.theoretical_candidates,
        workers=args.workers,
    )


def _load_curves(args) -> list[PolygonalCurve]:
    fmt = TrajectoryCSVFormat(
        id_col=args.id_col, coord_cols=(args.x_col, args.y_col), lonlat=args.lonlat
    )
    curves = load_trajectories_csv(args.input, fmt)
    if not curves:
        raise ParameterError(f"{args.input}: no usable curves")
    return curves


def cmd_simplify(args) -> int:
    if args.delta_simp is None:
        print("error: --delta-simp is required", file=sys.stderr)
        return 2
    curves = _load_curves(args)
    with open(args.output, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "x", "y", "source_index"])
        for c in sorted(curves, key=lambda c: c.curve_id):
            spl = delta_good_simplify(c, args.delta_simp / 3.0)
            for src, v in zip(spl.source_indices, spl.curve.vertices):
                w.writerow([c.curve_id, repr(float(v[0])), repr(float(v[1])), int(src)])
            print(f"{c.curve_id}: {c.n_edges + 1} -> {spl.n_kept} vertices")
    return 0


def _print_summary(res) -> None:
    total_n = "-"
    print(f"curves: {len(res.curve_ids)}")
    print(f"simplified vertices: {sum(s.n_kept for s in res.simplifications)}")
    print(f"candidates: {res.n_candidates}")
    print(f"solution size: {res.k}")
    print(f"coverage fraction: {res.covered_fraction:.6f} ({res.stop_reason})")
    if res.lower_bound:
        print(f"lower bound: {res.lower_bound}  ratio: {res.k / res.lower_bound:.3f}")
    for phase, sec in res.timings.items():
        print(f"  {phase}: {sec:.3f}s")


def cmd_cluster(args) -> int:
    cfg = _config_from(args)
    curves = _load_curves(args)
    res = cluster(curves, cfg)
    export_result(res, args.output, format="json")
    if args.geojson:
        export_result(res, args.geojson, format="geojson")
    _print_summary(res)
    return 0


def cmd_label(args) -> int:
    cfg = _config_from(args)
    pose = load_pose_csv(args.poses)
    truth = load_ground_truth_csv(args.truth)
    if len(truth) != pose.vertices.shape[0]:
        raise ParameterError(
            f"ground truth has {len(truth)} frames, pose curve has "
            f"{pose.vertices.shape[0]}"
        )
    t0 = time.perf_counter()
    res = cluster([pose], cfg)
    labeling = assign_labels(res, truth)
    seconds = time.perf_counter() - t0
    with open(args.output, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["frame_index", "label"])
        for i, lab in enumerate(labeling.labels):
            w.writerow([i, lab])
    m = metrics(labeling.labels, truth)
    if args.metrics:
        with open(args.metrics, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["trial", "method", "accuracy", "precision", "recall", "seconds"])
            w.writerow(
                [args.trial, "curvecover", f"{m.accuracy:.6f}",
                 f"{m.macro_precision:.6f}", f"{m.macro_recall:.6f}", f"{seconds:.3f}"]
            )
    print(f"centers: {res.k}  accuracy: {m.accuracy:.4f}  "
          f"precision: {m.macro_precision:.4f}  recall: {m.macro_recall:.4f}")
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = []
    for n in sizes:
        m = max(2, n // args.points_per_curve)
        curves = drifter_batch(m, args.points_per_curve, seed=args.seed,
                               step=1.0, spread=args.spread)
        cfg = ClusteringConfig.theory(
            args.delta if args.delta is not None else 1.0,
            l=args.max_complexity,
            workers=args.workers,
        )
        res = cluster(curves, cfg)
        row = {"n": n, "m": m, "k": res.k, "total": res.timings["total"]}
        row.update({f"t_{k}": v for k, v in res.timings.items() if k != "total"})
        rows.append(row)
        print(f"n={n}: k={res.k} total={row['total']:.2f}s")
    fields = sorted({k for r in rows for k in r}, key=lambda k: (k != "n", k))
    with open(args.output, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)
    if len(rows) >= 2:
        ns = np.log([r["n"] for r in rows])
        ts = np.log([r["total"] for r in rows])
        slope = float(np.polyfit(ns, ts, 1)[0])
        print(f"log-log slope: {slope:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="curvecover",
        description="Subtrajectory clustering of polygonal curves",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simplify", help="write simplified curves as CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--delta-simp", type=float, required=True)
    _add_csv_args(p)
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("cluster", help="cluster trajectories, write result JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--geojson", default=None, help="also write GeoJSON here")
    _add_delta_args(p)
    _add_csv_args(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("label", help="segment a pose curve and score vs ground truth")
    p.add_argument("--poses", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--metrics", default=None)
    p.add_argument("--trial", default="0")
    _add_delta_args(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("bench", help="synthetic runtime sweep, write timing CSV")
    p.add_argument("--sizes", required=True, help="comma list of total point counts")
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points-per-curve", type=int, default=200)
    p.add_argument("--spread", type=float, default=4.0)
    _add_delta_args(p)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, SimplificationError, UncoverableError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
