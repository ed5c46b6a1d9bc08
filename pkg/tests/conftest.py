"""Shared fixtures: canonical parameter sets and admissible-point samplers."""

import numpy as np
import pytest

from mhlab.maps import MapParams, PhasePoint, map_for


@pytest.fixture
def kdv2():
    return MapParams(family="kdv", period=2, epsilon=2.0, delta=0.05)


@pytest.fixture
def kdv3():
    return MapParams(family="kdv", period=3, epsilon=2.0, delta=0.05)


@pytest.fixture
def mkdv():
    return MapParams(family="mkdv", period=2, rho=1.08)


def sample_points(params, count, seed=0, box_scale=None):
    """Random phase points with every map denominator bounded away
    from zero.  The default box keeps all denominators above 0.1·ε:
    |q|,|p| ≤ 0.6·ε for one canonical pair, 0.45·ε for two (where the
    sum ε+q₁+q₂ appears in a denominator).
    """
    rng = np.random.default_rng(seed)
    width = 2 * (params.period - 1)
    if box_scale is None:
        box_scale = 0.6 if params.period == 2 else 0.45
    box = box_scale * params.epsilon if params.family == "kdv" else box_scale
    pts = []
    step = map_for(params)
    while len(pts) < count:
        z = PhasePoint(tuple(rng.uniform(-box, box, width)))
        try:
            step(z, params)
        except Exception:
            continue
        pts.append(z)
    return pts
