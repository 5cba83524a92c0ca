import os
import tempfile

# Point the service at a throwaway database and data directory before app.config is imported
_SCRATCH = tempfile.mkdtemp(prefix="ramsey-tests-")
os.environ.setdefault("RAMSEY_DB_URL", f"sqlite:///{_SCRATCH}/test.db")
os.environ.setdefault("RAMSEY_DATA_DIR", os.path.join(_SCRATCH, "colorings"))
os.environ.setdefault("RAMSEY_LOG_LEVEL", "WARNING")

import pytest  # noqa: E402

from app.geometry.battery import make_coloring  # noqa: E402
from app.geometry.coloring import Coloring  # noqa: E402
from app.geometry.separated import build_maximal_separated  # noqa: E402
from app.geometry.torus import TorusSpec  # noqa: E402

from tests.helpers import forced_coloring, spread_site_ids  # noqa: E402

# Dart budget for fixtures; gap filling completes the set either way
SMALL_DARTS = 20_000


@pytest.fixture(scope="session")
def coloring_1d() -> Coloring:
    return make_coloring(1, 8.0, seed=0, x=0.3, max_darts=SMALL_DARTS)


@pytest.fixture(scope="session")
def coloring_2d() -> Coloring:
    return make_coloring(2, 4.0, seed=1, x=0.2, max_darts=SMALL_DARTS)


@pytest.fixture(scope="session")
def standard_coloring_1d() -> Coloring:
    """t = 1/3 and x = 1/20"""
    return make_coloring(1, 16.0, seed=3, max_darts=SMALL_DARTS)


def _spread_coloring(n: int, R: float, seed: int) -> Coloring:
    separated = build_maximal_separated(TorusSpec(n=n, R=R), 1.0 / 3.0, seed, max_darts=SMALL_DARTS)
    return forced_coloring(separated, spread_site_ids(separated), x=0.2, seed=seed)


@pytest.fixture(scope="session")
def red_coloring_2d() -> Coloring:
    """S forced to a greedy 1.7-separated subset of P"""
    return _spread_coloring(2, 8.0, seed=4)


@pytest.fixture(scope="session")
def red_coloring_3d() -> Coloring:
    return _spread_coloring(3, 2.5, seed=5)
