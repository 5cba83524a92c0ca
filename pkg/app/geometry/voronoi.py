"""Periodic nearest-neighbor index and the half-space description of Voronoi cells.

Cells are never built explicitly. A point belongs to the cell of every site whose
distance to it is within ``tie_tol`` of the minimum, and the half-spaces of a
cell are produced on demand from the sites within twice the covering radius.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from app.errors import UncertifiedSetError
from app.geometry.torus import TAU, TorusSpec, as_coords, distances_to, nearest_lift, reduce

if TYPE_CHECKING:
    from app.geometry.separated import SeparatedSet

logger = logging.getLogger(__name__)


class BucketGrid:
    """Cell list over the fundamental domain, wrapping at R on every axis.

    The bucket edge is R / floor(R / edge_hint), so it is never shorter than the
    hint and the buckets tile the torus exactly.
    """

    def __init__(self, spec: TorusSpec, edge_hint: float):
        self.spec = spec
        self.per_axis = max(1, int(math.floor(spec.R / edge_hint))) if edge_hint > 0 else 1
        self.edge = spec.R / self.per_axis
        self.buckets: Dict[Tuple[int, ...], List[int]] = {}
        self.coords: List[np.ndarray] = []

    def key(self, coord: np.ndarray) -> Tuple[int, ...]:
        return tuple(min(int(c // self.edge), self.per_axis - 1) for c in coord)

    def add(self, coord: np.ndarray) -> int:
        member = len(self.coords)
        self.coords.append(np.asarray(coord, dtype=float))
        self.buckets.setdefault(self.key(coord), []).append(member)
        return member

    def _axis_range(self, centre: int, reach: int) -> Sequence[int]:
        if 2 * reach + 1 >= self.per_axis:
            return range(self.per_axis)
        return [(centre + off) % self.per_axis for off in range(-reach, reach + 1)]

    def block(self, coord: np.ndarray, reach: int) -> Iterator[int]:
        """Members of every bucket within `reach` buckets (Chebyshev) of coord's bucket"""
        home = self.key(coord)
        ranges = [self._axis_range(c, reach) for c in home]
        for bucket in itertools.product(*ranges):
            yield from self.buckets.get(bucket, ())

    def covers_all(self, reach: int) -> bool:
        return 2 * reach + 1 >= self.per_axis

    def within(self, coord: np.ndarray, radius: float) -> List[int]:
        """Members at torus distance <= radius (+TAU) of coord"""
        reach = int(math.ceil(radius / self.edge))
        ids = list(self.block(coord, reach))
        if not ids:
            return []
        d = distances_to(np.asarray([self.coords[i] for i in ids]), coord, self.spec.R)
        return [i for i, dist in zip(ids, d) if dist <= radius + TAU]

    def is_clear(self, coord: np.ndarray, radius: float) -> bool:
        """True when no member is closer than radius - TAU"""
        reach = int(math.ceil(radius / self.edge))
        ids = list(self.block(coord, reach))
        if not ids:
            return True
        d = distances_to(np.asarray([self.coords[i] for i in ids]), coord, self.spec.R)
        return bool(np.all(d >= radius - TAU))


def periodic_tree(coords: np.ndarray, R: float) -> cKDTree:
    return cKDTree(reduce(np.array(coords, dtype=float), R), boxsize=R)


def close_pairs(coords: np.ndarray, radius: float, spec: TorusSpec) -> List[Tuple[int, int]]:
    """All pairs i < j at torus distance <= radius (+TAU)."""
    grid = BucketGrid(spec, radius)
    for c in coords:
        grid.add(c)
    pairs = []
    for i, c in enumerate(coords):
        pairs.extend((i, j) for j in grid.within(c, radius) if j > i)
    return sorted(pairs)


class NearestResult(NamedTuple):
    ids: List[int]
    distance: float


@dataclass(frozen=True)
class HalfSpace:
    """{x : normal . x <= offset} in coordinates centred at the cell's site."""

    normal: np.ndarray
    offset: float
    neighbor: int

    def slack(self, q_local: np.ndarray) -> float:
        """Signed distance of q_local inside the bounding hyperplane (positive = inside)"""
        return float((self.offset - self.normal @ q_local) / np.linalg.norm(self.normal))


class PeriodicIndex:
    """Bucket grid for exact, tie-aware queries plus a periodic k-d tree for batches."""

    def __init__(self, separated: "SeparatedSet"):
        if len(separated) == 0:
            raise ValueError("cannot index an empty point set")
        self.separated = separated
        self.spec = separated.spec
        self.coords = separated.coords
        self.grid = BucketGrid(self.spec, separated.t)
        for c in self.coords:
            self.grid.add(c)
        self.tree = periodic_tree(self.coords, self.spec.R)
        logger.debug(
            "indexed %d sites in %d buckets of edge %.4f",
            len(self.coords), len(self.grid.buckets), self.grid.edge,
        )

    def __len__(self):
        return len(self.coords)

    def nearest(self, q, tie_tol: float = TAU) -> NearestResult:
        q = reduce(as_coords(q, self.spec).copy(), self.spec.R)
        reach = 1
        while True:
            ids = list(self.grid.block(q, reach))
            if ids:
                d = distances_to(self.coords[ids], q, self.spec.R)
                dmin = float(d.min())
                if reach * self.grid.edge >= dmin + tie_tol or self.grid.covers_all(reach):
                    tied = sorted(i for i, dist in zip(ids, d) if dist <= dmin + tie_tol)
                    return NearestResult(tied, dmin)
            elif self.grid.covers_all(reach):
                raise ValueError("index is empty")
            reach += 1

    def nearest_distances(self, qs: np.ndarray) -> np.ndarray:
        """Distance from each row of qs to its nearest site"""
        qs = reduce(np.array(qs, dtype=float).reshape(-1, self.spec.n), self.spec.R)
        d, _ = self.tree.query(qs)
        return d

    def within(self, q, s: float) -> List[int]:
        q = reduce(as_coords(q, self.spec).copy(), self.spec.R)
        return sorted(self.grid.within(q, s))

    def neighbors_within(self, p: int, s: float) -> List[int]:
        """Sites other than p at torus distance <= s of site p."""
        return [i for i in self.within(self.coords[p], s) if i != p]


def build_index(separated: "SeparatedSet") -> PeriodicIndex:
    return PeriodicIndex(separated)


def cell_halfspaces(index: PeriodicIndex, p: int) -> List[HalfSpace]:
    """Bisector half-spaces of site p against every site within twice the covering radius.

    Only sound when the covering radius is certified: a cell then has radius at
    most t, so no site farther than 2t can contribute a facet.
    """
    separated = index.separated
    if not separated.maximality_certified:
        raise UncertifiedSetError("cell half-spaces need a covering-certified point set")
    site = index.coords[p]
    halfspaces = []
    for j in index.neighbors_within(p, 2 * separated.t):
        normal = nearest_lift(site, index.coords[j], index.spec) - site
        halfspaces.append(HalfSpace(normal=normal, offset=float(normal @ normal) / 2, neighbor=j))
    return halfspaces


def cell_contains(halfspaces: Sequence[HalfSpace], q_local, tol: float = TAU) -> bool:
    q_local = np.atleast_1d(np.asarray(q_local, dtype=float))
    return all(h.slack(q_local) >= -tol for h in halfspaces)


def local_coords(index: PeriodicIndex, p: int, q) -> np.ndarray:
    """Position of q relative to site p, using the nearest lift"""
    site = index.coords[p]
    return nearest_lift(site, as_coords(q, index.spec), index.spec) - site
