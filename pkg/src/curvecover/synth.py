"""Seeded synthetic trajectory generator for benchmarks and tests.

Produces smooth random-walk curves resembling ocean drifter tracks: gamma
segment lengths and normally distributed turning angles.  Start positions
are spread over a square whose side grows with the total point count, so
batches of different sizes have comparable crowding.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import PolygonalCurve


def drifter_batch(
    m: int,
    n_per_curve: int,
    seed: int,
    step: float = 1.0,
    turn_sigma: float = 0.3,
    spread: float = 1.0,
) -> list[PolygonalCurve]:
    """``m`` random-walk curves of ``n_per_curve`` points each."""
    if m < 1 or n_per_curve < 2:
        raise ValueError("need m >= 1 curves with >= 2 points each")
    rng = np.random.default_rng(seed)
    side = step * math.sqrt(m * n_per_curve) * spread
    curves = []
    for i in range(m):
        start = rng.uniform(0.0, side, size=2)
        headings = rng.uniform(0, 2 * math.pi) + np.cumsum(
            rng.normal(0.0, turn_sigma, n_per_curve - 1)
        )
        lengths = rng.gamma(4.0, step / 4.0, n_per_curve - 1)
        steps = lengths[:, None] * np.stack(
            [np.cos(headings), np.sin(headings)], axis=1
        )
        pts = np.vstack([start, start + np.cumsum(steps, axis=0)])
        curves.append(PolygonalCurve(pts, curve_id=f"d{i:04d}"))
    return curves
