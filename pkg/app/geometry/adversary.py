"""Attacks on a coloring: red unit-distance pairs, blue copies of l_m and of a general K.

Every search splits its trials into chunks. Each random quantity of a chunk has its own
seed-derived stream, so the draws of trial i depend only on (seed, i): never on the
total trial count or the worker count.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from app.config import SETTINGS
from app.errors import DimensionMismatchError, NotSeparatedError, PreconditionError
from app.geometry import rng
from app.geometry.coloring import Color, Coloring, red_arcs_1d
from app.geometry.separated import certify, min_pair_distance
from app.geometry.torus import TAU, displacement
from app.schemas.reports import Certificate, CheckResult, RedPairWitness

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-9
# rows of points colored per red_mask call inside a search chunk
POINT_BLOCK = 1 << 18


@dataclass(frozen=True)
class KSet:
    """A 1-separated finite set translated so that k_0 is the origin"""

    points: np.ndarray

    @classmethod
    def from_points(cls, points, validate: bool = True) -> "KSet":
        pts = np.atleast_2d(np.array(points, dtype=float))
        pts = pts - pts[0]
        if validate and len(pts) > 1:
            close = cKDTree(pts).query_pairs(1 - TAU)
            if close:
                i, j = min(close)
                raise NotSeparatedError(i, j, float(np.linalg.norm(pts[i] - pts[j])), 1.0)
        pts.setflags(write=False)
        return cls(pts)

    @classmethod
    def line(cls, m: int, n: int) -> "KSet":
        """l_m along the first axis"""
        if m < 1:
            raise PreconditionError("l_m needs m >= 1")
        pts = np.zeros((m, n))
        pts[:, 0] = np.arange(m)
        return cls.from_points(pts, validate=False)

    def __len__(self):
        return len(self.points)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def diameter(self) -> float:
        return float(pdist(self.points).max()) if len(self) > 1 else 0.0

    @property
    def separation(self) -> float:
        return float(pdist(self.points).min()) if len(self) > 1 else math.inf


@dataclass(frozen=True)
class Placement:
    rotation: np.ndarray
    translation: np.ndarray

    def apply(self, K: KSet) -> np.ndarray:
        return K.points @ self.rotation.T + self.translation

    def validate(self, K: KSet) -> None:
        n = K.n
        if not np.allclose(self.rotation.T @ self.rotation, np.eye(n), rtol=0, atol=1e-10):
            raise PreconditionError("placement rotation is not orthogonal")
        if len(K) > 1:
            drift = np.abs(pdist(self.apply(K)) - pdist(K.points)).max()
            if drift > 1e-9:
                raise PreconditionError(f"placement distorts K distances by {drift!r}")


@dataclass(frozen=True)
class LineQuery:
    """The points base + i*direction, i = 0..m-1"""

    base: np.ndarray
    direction: np.ndarray
    m: int

    def __post_init__(self):
        if abs(np.linalg.norm(self.direction) - 1) > 1e-12:
            raise PreconditionError("line direction must be a unit vector")
        if self.m < 1:
            raise PreconditionError("a line query needs m >= 1")

    @property
    def points(self) -> np.ndarray:
        return self.base + np.arange(self.m)[:, None] * self.direction


def _unit_vectors(gen: np.random.Generator, count: int, n: int) -> np.ndarray:
    v = gen.standard_normal((count, n))
    norms = np.linalg.norm(v, axis=1)
    # a zero draw has probability zero; keep it well-defined anyway
    v[norms == 0, 0] = 1.0
    norms[norms == 0] = 1.0
    return v / norms[:, None]


def _all_blue(coloring: Coloring, points: np.ndarray) -> bool:
    return all(coloring.color(p) is Color.BLUE for p in points)


def red_pair_certificate(coloring: Coloring, reverify: bool = False) -> Certificate:
    """Sufficient conditions for no red pair at distance exactly 1.

    Two red points in one cell are within 2t; in one cell across periods they are
    at least R - 2t apart; in distinct red cells at least d(S) - 2t apart.
    """
    separated = coloring.separated
    spec, t = coloring.spec, separated.t
    exclusion = coloring.config.exclusion_radius
    checks: List[CheckResult] = []

    if reverify:
        separated = certify(separated)
    cert = separated.certificate
    covered = separated.maximality_certified and 2 * t < 1
    checks.append(CheckResult(
        name="cell-diameter",
        passed=covered,
        detail=(f"covering radius {cert.radius!r} certified, cell diameter <= {2 * t!r}" if cert
                else "no covering certificate"),
        witness=cert.witness if cert and not cert.passed else None,
    ))

    s_ids = np.flatnonzero(coloring.s_bits)
    d, pair = min_pair_distance(separated.coords[s_ids], spec, exclusion + TAU)
    s_ok = d > exclusion + TAU
    checks.append(CheckResult(
        name="s-separation",
        passed=s_ok,
        detail=f"min S distance {d!r} against {exclusion + TAU!r}" if pair else f"no S pair within {exclusion!r}",
        witness=None if s_ok else [int(s_ids[pair[0]]), int(s_ids[pair[1]]), d],
    ))

    period_ok = spec.R - 2 * t > 1
    checks.append(CheckResult(
        name="period",
        passed=period_ok,
        detail=f"R - 2t = {spec.R - 2 * t!r}",
        witness=None if period_ok else [spec.R, t],
    ))
    result = Certificate(name="red-pair", passed=all(c.passed for c in checks), checks=checks)
    logger.info("red-pair certificate: %s", "PASS" if result.passed else "FAIL")
    return result


def _nearest_partners(coloring: Coloring) -> Optional[np.ndarray]:
    """Index (into S) of each S site's nearest other S site, minimum image"""
    s_coords = coloring.separated.coords[coloring.s_bits]
    if len(s_coords) < 2:
        return None
    disp = displacement(s_coords[:, None, :], s_coords[None, :, :], coloring.spec.R)
    dist = np.linalg.norm(disp, axis=-1)
    np.fill_diagonal(dist, np.inf)
    return dist.argmin(axis=1)


def _unit_toward(q: np.ndarray, target: np.ndarray, R: float) -> np.ndarray:
    """q moved one unit along the minimum-image segment from q to target"""
    towards = displacement(q, target, R)
    norms = np.linalg.norm(towards, axis=1)
    norms[norms == 0] = 1.0
    return q + towards / norms[:, None]


def red_pair_search(coloring: Coloring, trials: int, seed: int,
                    workers: Optional[int] = None) -> Optional[RedPairWitness]:
    """Look for two red points at distance 1; None is the expected outcome.

    Each trial draws a red point q uniformly from the cube of half-width t around a
    random S site, and tests q against the point one unit away in a random direction.
    It also draws a second red point around the nearest other S site and slides it
    along the segment to distance exactly 1 from q. The earliest hit by trial index wins.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    s_coords = coloring.separated.coords[coloring.s_bits]
    if not len(s_coords):
        return None
    n, R, t = coloring.spec.n, coloring.spec.R, coloring.separated.t
    partners = _nearest_partners(coloring)

    def chunk(index: int, start: int, stop: int) -> Optional[RedPairWitness]:
        k = stop - start
        site = rng.stream(seed, "red-pair-site", index).integers(len(s_coords), size=k)
        q = s_coords[site] + rng.stream(seed, "red-pair-offset", index).uniform(-t, t, size=(k, n))
        u = _unit_vectors(rng.stream(seed, "red-pair-direction", index), k, n)
        red = coloring.red_mask(q)
        candidates = [q + u]
        if partners is not None:
            mates = s_coords[partners[site]] + rng.stream(seed, "red-pair-mate", index).uniform(-t, t, size=(k, n))
            candidates.append(_unit_toward(q, mates, R))
        best: Optional[RedPairWitness] = None
        for other in candidates:
            for i in np.flatnonzero(red & coloring.red_mask(other)):
                dist = float(np.linalg.norm(other[i] - q[i]))
                if abs(dist - 1) <= UNIT_TOL and (best is None or start + int(i) < best.trial):
                    best = RedPairWitness(first=q[i].tolist(), second=other[i].tolist(),
                                          distance=dist, trial=start + int(i))
                    break
        return best

    found = rng.first_hit(trials, chunk, workers)
    logger.info("red-pair search seed=%d trials=%d: %s", seed, trials, "FOUND" if found else "none")
    return found


def blue_line_search(coloring: Coloring, m: int, trials: int, seed: int,
                     workers: Optional[int] = None) -> Optional[LineQuery]:
    """First all-blue copy of l_m with base in [0, 3R)^n and a uniform direction.

    The draws of trial i do not depend on m, so success is monotone in m and in trials.
    """
    if m < 1:
        raise PreconditionError("m must be at least 1")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    spec = coloring.spec
    steps = np.arange(m, dtype=float)
    block = max(1, POINT_BLOCK // m)

    def chunk(index: int, start: int, stop: int) -> Optional[LineQuery]:
        k = stop - start
        bases = rng.stream(seed, "blue-line-base", index).uniform(0.0, 3 * spec.R, size=(k, spec.n))
        directions = _unit_vectors(rng.stream(seed, "blue-line-direction", index), k, spec.n)
        for lo in range(0, k, block):
            hi = min(lo + block, k)
            pts = bases[lo:hi, None, :] + steps[None, :, None] * directions[lo:hi, None, :]
            red = coloring.red_mask(pts.reshape(-1, spec.n)).reshape(hi - lo, m)
            for i in np.flatnonzero(~red.any(axis=1)):
                line = LineQuery(bases[lo + i], directions[lo + i], m)
                if _all_blue(coloring, line.points):
                    return line
        return None

    return rng.first_hit(trials, chunk, workers)


def longest_blue_run(coloring: Coloring, trials: int, seed: int, m_max: Optional[int] = None,
                     workers: Optional[int] = None) -> int:
    """Largest m for which blue_line_search succeeds, by doubling then bisection, capped at m_max"""
    m_max = m_max or SETTINGS["search"]["m_max"]
    if not coloring.s_bits.any():
        return m_max

    def found(m: int) -> bool:
        return blue_line_search(coloring, m, trials, seed, workers) is not None

    if not found(1):
        return 0
    lo, hi = 1, 2
    while True:
        hi = min(hi, m_max)
        if not found(hi):
            break
        lo = hi
        if hi == m_max:
            return m_max
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if found(mid):
            lo = mid
        else:
            hi = mid
    logger.info("longest blue run seed=%d trials=%d: %d", seed, trials, lo)
    return lo


class _ArcUnion:
    """Union of closed arcs on the circle [0, R), merged when gaps are within TAU"""

    def __init__(self, R: float):
        self.R = R
        self.spans: List[Tuple[float, float]] = []

    def add(self, start: float, length: float) -> None:
        R = self.R
        if length >= R - TAU:
            self.spans = [(0.0, R)]
            return
        s = start % R
        pieces = [(s, s + length)] if s + length <= R else [(s, R), (0.0, s + length - R)]
        merged: List[Tuple[float, float]] = []
        for lo, hi in sorted(self.spans + pieces):
            if merged and lo <= merged[-1][1] + TAU:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        self.spans = merged

    @property
    def covers_circle(self) -> bool:
        return (len(self.spans) == 1 and self.spans[0][0] <= TAU
                and self.spans[0][1] >= self.R - TAU)


def blue_runs_from_arcs(arcs: Sequence[Tuple[float, float]], R: float, m_max: int) -> Optional[int]:
    """Exact longest all-blue {p, p+1, ..., p+m-1} on a circle whose red set is the given closed arcs.

    p is a valid start for l_m iff it avoids every arc shifted by -i, i < m. Returns
    None when no bound exists: the shifts cycle (i = 0 mod R) or m_max is passed.
    """
    if not arcs:
        return None
    union = _ArcUnion(R)
    for i in range(m_max + 1):
        if i:
            r = math.fmod(i, R)
            if min(r, R - r) <= TAU:
                return None
        for lo, hi in arcs:
            union.add(lo - i, hi - lo)
        if union.covers_circle:
            return i
    return None


def exact_blue_runs_1d(coloring: Coloring, m_max: Optional[int] = None) -> Optional[int]:
    if coloring.spec.n != 1:
        raise DimensionMismatchError("the exact run oracle needs n = 1")
    m_max = m_max or SETTINGS["search"]["exact_1d_m_max"]
    return blue_runs_from_arcs(red_arcs_1d(coloring), coloring.spec.R, m_max)


def _haar_orthogonal(gen: np.random.Generator, count: int, n: int) -> np.ndarray:
    q, r = np.linalg.qr(gen.standard_normal((count, n, n)))
    signs = np.sign(np.diagonal(r, axis1=1, axis2=2))
    signs[signs == 0] = 1.0
    return q * signs[:, None, :]


def blue_placement_search(coloring: Coloring, K: KSet, trials: int, seed: int,
                          workers: Optional[int] = None) -> Optional[Placement]:
    spec = coloring.spec
    if K.n != spec.n:
        raise DimensionMismatchError(f"K lives in dimension {K.n}, coloring in {spec.n}")
    if K.diameter > spec.R - 1 + TAU:
        raise PreconditionError(f"K diameter {K.diameter!r} exceeds R - 1 = {spec.R - 1!r}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    size = len(K)
    block = max(1, POINT_BLOCK // size)

    def chunk(index: int, start: int, stop: int) -> Optional[Placement]:
        k = stop - start
        rotations = _haar_orthogonal(rng.stream(seed, "blue-placement-rotation", index), k, spec.n)
        translations = rng.stream(seed, "blue-placement-shift", index).uniform(0.0, 3 * spec.R, size=(k, spec.n))
        for lo in range(0, k, block):
            hi = min(lo + block, k)
            pts = np.einsum("tij,mj->tmi", rotations[lo:hi], K.points) + translations[lo:hi, None, :]
            red = coloring.red_mask(pts.reshape(-1, spec.n)).reshape(hi - lo, size)
            for i in np.flatnonzero(~red.any(axis=1)):
                placement = Placement(rotations[lo + i], translations[lo + i])
                if _all_blue(coloring, placement.apply(K)):
                    placement.validate(K)
                    return placement
        return None

    return rng.first_hit(trials, chunk, workers)
