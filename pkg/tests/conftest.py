"""Shared helpers: random curve generators and a dense-sampling oracle for
the continuous Frechet distance."""

import math
import pathlib

import numpy as np
import pytest

from curvecover.geometry import (
    PolygonalCurve,
    discrete_frechet,
    sample_curve,
)

DATA_DIR = pathlib.Path(__file__).parent / "data"


def random_curve(rng, n, d=2, scale=1.0, curve_id=None):
    """Jagged random curve: i.i.d. uniform vertices in a box."""
    return PolygonalCurve(rng.uniform(-scale, scale, (n, d)), curve_id=curve_id)


def smooth_walk(rng, n, d=2, step=0.3, turn=0.25, start=None, curve_id=None):
    """Random walk with correlated headings; planar only for d == 2."""
    if d != 2:
        pts = np.cumsum(rng.normal(0, step, (n, d)), axis=0)
        return PolygonalCurve(pts, curve_id=curve_id)
    heading = rng.uniform(0, 2 * math.pi) + np.cumsum(rng.normal(0, turn, n - 1))
    lengths = rng.gamma(4.0, step / 4.0, n - 1)
    steps = lengths[:, None] * np.stack([np.cos(heading), np.sin(heading)], axis=1)
    s = np.asarray(start, float) if start is not None else rng.uniform(0, 6, 2)
    return PolygonalCurve(np.vstack([s, s + np.cumsum(steps, axis=0)]), curve_id=curve_id)


def frechet_estimate(P: PolygonalCurve, Q: PolygonalCurve, spacing: float) -> float:
    """Continuous Frechet distance up to +/- spacing, via dense sampling.

    The discrete coupling distance of samples at most ``spacing`` apart along
    each curve differs from the continuous distance by less than ``spacing``.
    """
    return discrete_frechet(sample_curve(P, spacing), sample_curve(Q, spacing))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
