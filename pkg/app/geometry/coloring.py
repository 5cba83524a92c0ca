"""Random red/blue coloring of E^n with period R.

Q keeps each site of P independently with probability x; S keeps the members of
Q with no other Q-member within 1 + 2t (5/3 at t = 1/3). A point is red when
some nearest site, up to tie_tol, lies in S, so red cells include their boundaries.
"""
import logging
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.geometry import bounds, rng
from app.geometry.separated import SeparatedSet, certify, min_pair_distance
from app.geometry.torus import TAU, TorusSpec, as_coords, reduce
from app.geometry.voronoi import BucketGrid, PeriodicIndex, build_index, periodic_tree

logger = logging.getLogger(__name__)


class Color(str, Enum):
    RED = "red"
    BLUE = "blue"


class ColoringConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec: TorusSpec
    t: float = 1.0 / 3.0
    x: float = None
    seed: int = 0
    tie_tol: float = TAU

    @model_validator(mode="before")
    @classmethod
    def default_x(cls, data):
        if isinstance(data, dict) and data.get("x") is None:
            spec = data.get("spec")
            n = spec.n if isinstance(spec, TorusSpec) else spec["n"]
            data = {**data, "x": bounds.standard_x(n)}
        return data

    @model_validator(mode="after")
    def check_ranges(self):
        if not 0 <= self.x <= 1:
            raise ValueError(f"sampling probability x={self.x} must lie in [0, 1]")
        if not self.t > 0 or self.tie_tol < 0:
            raise ValueError("need t > 0 and tie_tol >= 0")
        return self

    @property
    def uses_standard_x(self) -> bool:
        return math.isclose(self.x, bounds.standard_x(self.spec.n), rel_tol=1e-12)

    @property
    def exclusion_radius(self) -> float:
        return 1 + 2 * self.t


def sample_q(separated: SeparatedSet, config: ColoringConfig) -> np.ndarray:
    """Bernoulli(x) membership flag per site, keyed on (seed, site id)"""
    return rng.member_uniforms(config.seed, len(separated)) < config.x


def filter_s(separated: SeparatedSet, q_bits: np.ndarray, radius: float = bounds.EXCLUSION_RADIUS) -> np.ndarray:
    """Members of Q with no other Q-member within `radius`."""
    q_ids = np.flatnonzero(q_bits)
    grid = BucketGrid(separated.spec, radius)
    for i in q_ids:
        grid.add(separated.coords[i])
    s_bits = np.zeros(len(separated), dtype=bool)
    for local, i in enumerate(q_ids):
        if grid.within(separated.coords[i], radius) == [local]:
            s_bits[i] = True
    return s_bits


class Coloring:
    def __init__(self, config: ColoringConfig, separated: SeparatedSet, q_bits: np.ndarray,
                 s_bits: np.ndarray, index: Optional[PeriodicIndex] = None):
        self.config = config
        self.separated = separated
        self.spec = separated.spec
        self.q_bits = np.asarray(q_bits, dtype=bool)
        self.s_bits = np.asarray(s_bits, dtype=bool)
        self.index = index or build_index(separated)
        s_coords = separated.coords[self.s_bits]
        self._s_tree = periodic_tree(s_coords, self.spec.R) if len(s_coords) else None

    @property
    def q_ids(self) -> List[int]:
        return [int(i) for i in np.flatnonzero(self.q_bits)]

    @property
    def s_ids(self) -> List[int]:
        return [int(i) for i in np.flatnonzero(self.s_bits)]

    def color(self, point) -> Color:
        ids, _ = self.index.nearest(point, self.config.tie_tol)
        return Color.RED if self.s_bits[ids].any() else Color.BLUE

    def red_mask(self, points: np.ndarray) -> np.ndarray:
        """Vectorised colour of many points of E^n: True where red"""
        pts = reduce(np.array(points, dtype=float).reshape(-1, self.spec.n), self.spec.R)
        if self._s_tree is None:
            return np.zeros(len(pts), dtype=bool)
        d_p, _ = self.index.tree.query(pts)
        d_s, _ = self._s_tree.query(pts)
        return d_s <= d_p + self.config.tie_tol

    def recertified(self) -> "Coloring":
        """Same coloring over a freshly covering-certified copy of P"""
        return Coloring(self.config, certify(self.separated), self.q_bits, self.s_bits)

    def min_s_distance(self) -> Optional[float]:
        s_coords = self.separated.coords[self.s_bits]
        if len(s_coords) < 2:
            return None
        d, _ = min_pair_distance(s_coords, self.spec, self.spec.max_distance)
        return d


def build_coloring(separated: SeparatedSet, config: ColoringConfig) -> Coloring:
    q_bits = sample_q(separated, config)
    s_bits = filter_s(separated, q_bits, config.exclusion_radius)
    coloring = Coloring(config, separated, q_bits, s_bits)
    logger.info("coloring seed=%d x=%.3g: |P|=%d |Q|=%d |S|=%d",
                config.seed, config.x, len(separated), int(q_bits.sum()), int(s_bits.sum()))
    return coloring


def color(coloring: Coloring, point) -> Color:
    return coloring.color(as_coords(point, coloring.spec))


def exclusion_count(index: PeriodicIndex, p: int, radius: float = bounds.EXCLUSION_RADIUS) -> int:
    """N(p): other sites close enough to knock p out of S"""
    return len(index.neighbors_within(p, radius))


def s_inclusion_probability_exact(index: PeriodicIndex, x: float, p: int,
                                  radius: float = bounds.EXCLUSION_RADIUS) -> float:
    """x (1-x)^{N(p)}; exact because only sites within the exclusion radius can eliminate p"""
    return x * (1 - x) ** exclusion_count(index, p, radius)


def resample_s_frequency(coloring: Coloring, p: int, trials: int, seed: Optional[int] = None,
                         workers: Optional[int] = None) -> float:
    """Fraction of fresh (Q, S) draws in which site p lands in S"""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    config = coloring.config
    seed = config.seed if seed is None else seed
    neighbors = coloring.index.neighbors_within(p, config.exclusion_radius)
    x = config.x

    def chunk(index: int, start: int, stop: int) -> int:
        u = rng.stream(seed, "resample", p, index).random((stop - start, 1 + len(neighbors)))
        return int(np.count_nonzero((u[:, 0] < x) & np.all(u[:, 1:] >= x, axis=1)))

    return sum(rng.run_chunked(trials, chunk, workers)) / trials


def red_density(coloring: Coloring, samples: int, seed: int, workers: Optional[int] = None) -> float:
    if samples < 1:
        raise ValueError("samples must be at least 1")
    spec = coloring.spec

    def chunk(index: int, start: int, stop: int) -> int:
        pts = rng.stream(seed, "density", index).uniform(0.0, spec.R, size=(stop - start, spec.n))
        return int(np.count_nonzero(coloring.red_mask(pts)))

    return sum(rng.run_chunked(samples, chunk, workers)) / samples


def red_arcs_1d(coloring: Coloring) -> List[Tuple[float, float]]:
    """Closed red arcs (start, end) of a 1-D coloring, start in [0, R), merged where they touch"""
    if coloring.spec.n != 1:
        raise ValueError("red arcs are only defined in dimension 1")
    R = coloring.spec.R
    sites = coloring.separated.coords[:, 0]
    order = np.argsort(sites)
    pos = sites[order]
    red = coloring.s_bits[order]
    if len(pos) == 1:
        return [(0.0, float(R))] if red[0] else []
    prev = np.roll(pos, 1)
    prev[0] -= R
    nxt = np.roll(pos, -1)
    nxt[-1] += R
    left = (prev + pos) / 2
    right = (pos + nxt) / 2
    arcs = []
    for lo, hi, is_red in zip(left, right, red):
        if not is_red:
            continue
        if arcs and abs(arcs[-1][1] - lo) <= TAU:
            arcs[-1] = (arcs[-1][0], hi)
        else:
            arcs.append((lo, hi))
    if len(arcs) > 1 and abs(arcs[-1][1] - (arcs[0][0] + R)) <= TAU:
        arcs[0] = (arcs[-1][0], arcs[0][1] + R)
        arcs.pop()
    out = []
    for lo, hi in arcs:
        start = float(lo % R)
        out.append((start, start + float(hi - lo)))
    return sorted(out)


def red_measure_1d(coloring: Coloring) -> float:
    """Exact fraction of the circle coloured red"""
    return min(1.0, sum(hi - lo for lo, hi in red_arcs_1d(coloring)) / coloring.spec.R)
