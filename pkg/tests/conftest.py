import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from passive_lsm.geometry import build_scene, draw_sources, make_shape  # noqa: E402
from passive_lsm.pulse import Pulse  # noqa: E402
from passive_lsm.synthesis import TimeGrid, simulate  # noqa: E402

TIME_GRID = TimeGrid(0.1, 200)
SOURCE_SEED = 0  # fixed before any run, never tuned


def scene_for(name):
    if name == "free":
        return build_scene([])
    if name == "twodisk":
        return build_scene([make_shape("disk", center=(0.25, 1.75), radius=1 / 3),
                            make_shape("disk", center=(1.75, 0.25), radius=0.2)])
    return build_scene([make_shape(name)])


@pytest.fixture(scope="session")
def simulated():
    """Memoized ``(scene, sources, dataset)`` for a scene name, beta and L."""
    memo = {}

    def get(name, beta, L, R=20.0, passive=True):
        key = (name, beta, L, R, passive)
        if key not in memo:
            scene = scene_for(name)
            src = draw_sources(L, R, beta, SOURCE_SEED)
            memo[key] = (scene, src, simulate(scene, Pulse(), TIME_GRID, src, passive=passive))
        return memo[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
