"""Maximal t-separated sets on the torus, their covering certificates and packing bounds."""
import dataclasses
import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from app.config import SETTINGS
from app.errors import CertificationError, GridTooCoarseError, NotSeparatedError, PreconditionError
from app.geometry import bounds
from app.geometry.torus import TAU, TorusPoint, TorusSpec, as_coords, distances_to, reduce
from app.geometry.voronoi import BucketGrid, close_pairs, periodic_tree
from app.schemas.reports import CheckResult, CoveringCertificate

logger = logging.getLogger(__name__)

MAX_FILL_ROUNDS = 64


class Strategy(str, Enum):
    RANDOM_DARTS = "random-darts"
    GRID_GREEDY = "grid-greedy"


@dataclass(frozen=True)
class SeparatedSet:
    spec: TorusSpec
    t: float
    coords: np.ndarray
    strategy: Optional[Strategy] = None
    seed: Optional[int] = None
    certificate: Optional[CoveringCertificate] = None

    def __post_init__(self):
        coords = reduce(np.array(self.coords, dtype=float).reshape(-1, self.spec.n), self.spec.R)
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    def __len__(self):
        return len(self.coords)

    @property
    def points(self) -> List[TorusPoint]:
        return [self.point(i) for i in range(len(self))]

    def point(self, i: int) -> TorusPoint:
        return TorusPoint(tuple(float(c) for c in self.coords[i]))

    @property
    def maximality_certified(self) -> bool:
        cert = self.certificate
        return cert is not None and cert.passed and cert.radius <= self.t + TAU

    @classmethod
    def from_points(cls, spec: TorusSpec, t: float, points, validate: bool = True) -> "SeparatedSet":
        coords = np.array([as_coords(p, spec) for p in points], dtype=float).reshape(-1, spec.n)
        separated = cls(spec=spec, t=t, coords=coords)
        if validate:
            check = verify_separation(separated)
            if not check.passed:
                i, j, d = check.witness
                raise NotSeparatedError(i, j, d, t)
        return separated

    def with_certificate(self, certificate: CoveringCertificate) -> "SeparatedSet":
        return dataclasses.replace(self, certificate=certificate)


def min_pair_distance(coords: np.ndarray, spec: TorusSpec, radius: float) -> Tuple[float, Optional[Tuple[int, int]]]:
    """Smallest torus distance among pairs within radius; (inf, None) when there are none"""
    best, pair = math.inf, None
    for i, j in close_pairs(coords, radius, spec):
        d = float(distances_to(coords[j:j + 1], coords[i], spec.R)[0])
        if d < best:
            best, pair = d, (i, j)
    return best, pair


def verify_separation(separated: SeparatedSet) -> CheckResult:
    d, pair = min_pair_distance(separated.coords, separated.spec, separated.t)
    passed = d >= separated.t - TAU
    detail = f"min pair distance {d!r} (t={separated.t!r})" if pair else f"no pair closer than t={separated.t!r}"
    witness = [pair[0], pair[1], d] if pair and not passed else None
    return CheckResult(name="separation", passed=passed, detail=detail, witness=witness)


def default_grid_pitch(t: float, n: int) -> float:
    """Pitch whose certification slack g*sqrt(n)/2 equals t/8"""
    return t / (4 * math.sqrt(n))


def _grid_axis(R: float, g: float) -> np.ndarray:
    count = int(math.ceil(R / g - 1e-12))
    return np.arange(count) * g


class _Sweep:
    def __init__(self):
        self.grid_points = 0
        self.refined_cells = 0
        self.max_grid_distance = 0.0
        self.far: List[np.ndarray] = []
        self.failing: List[np.ndarray] = []

    @property
    def uncovered(self) -> int:
        return sum(len(a) for a in self.far) + sum(len(a) for a in self.failing)

    def witness(self) -> Optional[List[float]]:
        for group in self.far + self.failing:
            if len(group):
                return [float(c) for c in group[0]]
        return None


def _covering_sweep(tree: cKDTree, spec: TorusSpec, radius: float, g: float,
                    refine_depth: int) -> _Sweep:
    """Sweep the pitch-g grid; cells that miss the slack test are halved up to refine_depth times.

    A cell of half-width h around c is covered when d(c) + h*sqrt(n) <= radius.
    Cells whose centre is already >= radius from the set are recorded in `far`.
    """
    n, R = spec.n, spec.R
    axis = _grid_axis(R, g)
    shape = (len(axis),) * n
    total = len(axis) ** n
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
    root_n = math.sqrt(n)
    chunk = SETTINGS["construction"]["grid_chunk"]
    sweep = _Sweep()
    sweep.grid_points = total
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        cells = axis[np.stack(np.unravel_index(idx, shape), axis=1)]
        h = g / 2
        d, _ = tree.query(cells)
        sweep.max_grid_distance = max(sweep.max_grid_distance, float(d.max()))
        for level in range(refine_depth + 1):
            if level:
                sweep.refined_cells += len(cells)
            covered = d + h * root_n <= radius
            far = d >= radius - TAU
            if far.any():
                sweep.far.append(cells[far])
            todo = cells[~covered & ~far]
            if not len(todo):
                break
            if level == refine_depth:
                sweep.failing.append(todo)
                break
            h /= 2
            cells = reduce((todo[:, None, :] + h * signs[None, :, :]).reshape(-1, n), R)
            d, _ = tree.query(cells)
    return sweep


def verify_covering(separated: SeparatedSet, radius: float, grid_pitch: float,
                    refine_depth: int = 0) -> CoveringCertificate:
    """Certify that every torus point lies within `radius` of the set.

    With refine_depth=0 this passes iff every point of the pitch-g grid is within
    radius - g*sqrt(n)/2 of the set. Positive depths halve failing grid cells and
    retest them with the smaller slack, which stays sound.
    """
    n = separated.spec.n
    slack = grid_pitch * math.sqrt(n) / 2
    if grid_pitch <= 0 or slack >= radius:
        raise GridTooCoarseError(f"grid pitch {grid_pitch!r} gives slack {slack!r} >= radius {radius!r}")
    if len(separated) == 0:
        raise PreconditionError("cannot certify covering of an empty set")
    tree = periodic_tree(separated.coords, separated.spec.R)
    sweep = _covering_sweep(tree, separated.spec, radius, grid_pitch, refine_depth)
    return _certificate(sweep, radius, grid_pitch, refine_depth, slack)


def _certificate(sweep: _Sweep, radius: float, grid_pitch: float, refine_depth: int,
                 slack: float) -> CoveringCertificate:
    cert = CoveringCertificate(
        passed=sweep.uncovered == 0,
        radius=radius,
        grid_pitch=grid_pitch,
        refine_depth=refine_depth,
        slack=slack,
        grid_points=sweep.grid_points,
        refined_cells=sweep.refined_cells,
        max_grid_distance=sweep.max_grid_distance,
        uncovered=sweep.uncovered,
        witness=sweep.witness(),
    )
    logger.info(
        "covering radius %.6g at pitch %.6g depth %d: %s (%d uncovered)",
        radius, grid_pitch, refine_depth, "PASS" if cert.passed else "FAIL", cert.uncovered,
    )
    return cert


def certify(separated: SeparatedSet, grid_pitch: Optional[float] = None,
            refine_depth: Optional[int] = None) -> SeparatedSet:
    """Attach a covering certificate at radius t"""
    g = grid_pitch or default_grid_pitch(separated.t, separated.spec.n)
    depth = SETTINGS["construction"]["refine_depth"] if refine_depth is None else refine_depth
    return separated.with_certificate(verify_covering(separated, separated.t, g, depth))


def _throw_darts(grid: BucketGrid, spec: TorusSpec, t: float, rng: np.random.Generator,
                 max_darts: int, failure_factor: int) -> None:
    batch = SETTINGS["construction"]["dart_batch"]
    streak = thrown = 0
    while thrown < max_darts and streak < failure_factor * len(grid.coords):
        candidates = rng.uniform(0.0, spec.R, size=(batch, spec.n))
        candidates = reduce(candidates, spec.R)
        thrown += batch
        d, _ = periodic_tree(np.asarray(grid.coords), spec.R).query(candidates)
        last_accepted = -1
        for i in np.flatnonzero(d >= t - TAU):
            if grid.is_clear(candidates[i], t):
                grid.add(candidates[i])
                last_accepted = int(i)
        streak = streak + batch if last_accepted < 0 else batch - 1 - last_accepted
    logger.debug("darts: %d thrown, %d accepted, final failure streak %d", thrown, len(grid.coords), streak)


def _seed_lattice(grid: BucketGrid, spec: TorusSpec, t: float) -> None:
    """Cubic lattice of pitch R/floor(R/t) >= t anchored at the origin"""
    per_axis = max(1, int(math.floor(spec.R / t)))
    if per_axis < 2:
        grid.add(np.zeros(spec.n))
        return
    axis = np.arange(per_axis) * (spec.R / per_axis)
    for corner in itertools.product(axis, repeat=spec.n):
        grid.add(np.asarray(corner))


def _fill_gaps(grid: BucketGrid, spec: TorusSpec, t: float, g: float, refine_depth: int,
               rng: np.random.Generator) -> CoveringCertificate:
    """Insert every sweep point that is >= t from the set until the covering certificate passes"""
    slack = g * math.sqrt(spec.n) / 2
    if slack >= t:
        raise GridTooCoarseError(f"grid pitch {g!r} gives slack {slack!r} >= t {t!r}")
    for round_no in range(MAX_FILL_ROUNDS):
        tree = periodic_tree(np.asarray(grid.coords), spec.R)
        sweep = _covering_sweep(tree, spec, t, g, refine_depth)
        if sweep.uncovered == 0:
            return _certificate(sweep, t, g, refine_depth, slack)
        if not sweep.far:
            raise CertificationError(
                f"covering at radius {t!r} not certified at pitch {g!r}, depth {refine_depth}; "
                f"{sweep.uncovered} cells unresolved and none insertable (retry with a finer grid)"
            )
        candidates = np.concatenate(sweep.far)
        added = 0
        for i in rng.permutation(len(candidates)):
            if grid.is_clear(candidates[i], t):
                grid.add(candidates[i])
                added += 1
        logger.info("fill round %d: %d candidates, %d inserted", round_no, len(candidates), added)
    raise CertificationError(f"covering not certified after {MAX_FILL_ROUNDS} fill rounds")


def build_maximal_separated(spec: TorusSpec, t: float, seed: int,
                            strategy: Strategy = Strategy.RANDOM_DARTS, *,
                            grid_pitch: Optional[float] = None,
                            refine_depth: Optional[int] = None,
                            max_darts: Optional[int] = None,
                            failure_factor: Optional[int] = None) -> SeparatedSet:
    """Greedy maximal t-separated set, certified by a covering sweep at radius t.

    random-darts: the origin, then uniform darts until failure_factor*|P| consecutive
    rejections or max_darts; grid-greedy: a cubic lattice of pitch >= t. Both end
    with gap filling from the certification grid in a seed-permuted order.
    """
    if not 0 < t < spec.R / 2:
        raise PreconditionError(f"separation t={t!r} must lie in (0, R/2)")
    strategy = Strategy(strategy)
    conf = SETTINGS["construction"]
    g = grid_pitch or default_grid_pitch(t, spec.n)
    depth = conf["refine_depth"] if refine_depth is None else refine_depth
    rng = np.random.default_rng([seed, 0 if strategy is Strategy.RANDOM_DARTS else 1])

    grid = BucketGrid(spec, t)
    if strategy is Strategy.RANDOM_DARTS:
        grid.add(np.zeros(spec.n))
        _throw_darts(
            grid, spec, t, rng,
            conf["max_darts"] if max_darts is None else max_darts,
            conf["failure_factor"] if failure_factor is None else failure_factor,
        )
    else:
        _seed_lattice(grid, spec, t)
    cert = _fill_gaps(grid, spec, t, g, depth, rng)
    separated = SeparatedSet(spec=spec, t=t, coords=np.asarray(grid.coords), strategy=strategy,
                             seed=seed, certificate=cert)
    logger.info("built %s set: n=%d R=%g t=%g |P|=%d", strategy.value, spec.n, spec.R, t, len(separated))
    return separated


def packing_bound(t: float, s: float, n: int) -> float:
    """Most points of a t-separated set within distance s of any point: (2s/t + 1)^n"""
    if t <= 0 or s < 0:
        raise PreconditionError("packing bound needs t > 0 and s >= 0")
    return (2 * s / t + 1) ** n


def count_within(separated: SeparatedSet, p, s: float) -> int:
    spec = separated.spec
    if not s < spec.R / 2 - separated.t / 2:
        raise PreconditionError(f"s={s!r} must be below R/2 - t/2 so the torus does not fold the count")
    q = reduce(as_coords(p, spec).copy(), spec.R)
    return int(np.count_nonzero(distances_to(separated.coords, q, spec.R) <= s + TAU))


def greedy_separated_indices(K, s: float) -> List[int]:
    """Indices of a greedy s-separated subset of the 1-separated Euclidean set K, in input order."""
    K = np.atleast_2d(np.asarray(K, dtype=float))
    if s < 1:
        raise PreconditionError("greedy subset separation s must be at least 1")
    if len(K) == 0:
        return []
    tree = cKDTree(K)
    close = tree.query_pairs(1 - TAU)
    if close:
        i, j = min(close)
        raise NotSeparatedError(i, j, float(np.linalg.norm(K[i] - K[j])), 1.0)
    blocked = np.zeros(len(K), dtype=bool)
    kept = []
    for i in range(len(K)):
        if blocked[i]:
            continue
        kept.append(i)
        blocked[tree.query_ball_point(K[i], s - TAU)] = True
    return kept


def greedy_separated_subset(K, s: float) -> np.ndarray:
    K = np.atleast_2d(np.asarray(K, dtype=float))
    return K[greedy_separated_indices(K, s)]


def max_count_bound(spec: TorusSpec) -> float:
    """(4 sqrt(n) R)^n; bounds.lemma1_bound also gives the (36nR^2/pi)^{n/2} step"""
    return bounds.lemma1_bound(spec.n, spec.R).final
