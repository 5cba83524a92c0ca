"""Distance and reduction arithmetic on the flat torus (E/RZ)^n."""
import itertools
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, model_validator

from app.errors import AmbiguousLiftError, DimensionMismatchError

# Absolute tolerance wherever equality of distances matters
TAU = 1e-9


class TorusSpec(BaseModel):
    """Dimension n and period R of the torus."""

    model_config = ConfigDict(frozen=True)

    n: int
    R: float
    allow_small_R: bool = False

    @model_validator(mode="after")
    def check_ranges(self):
        if self.n < 1:
            raise ValueError("dimension n must be at least 1")
        if not self.R > 0:
            raise ValueError("period R must be positive")
        if not self.allow_small_R and not self.R > 2:
            raise ValueError(f"period R={self.R} must exceed 2 (pass allow_small_R to relax)")
        return self

    @property
    def volume(self) -> float:
        return self.R ** self.n

    @property
    def max_distance(self) -> float:
        return float(np.sqrt(self.n) * self.R / 2)


@dataclass(frozen=True)
class TorusPoint:
    coords: Tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __len__(self):
        return len(self.coords)


PointLike = Union[TorusPoint, ArrayLike]


def as_coords(point: PointLike, spec: TorusSpec) -> np.ndarray:
    """Coordinates of one point as a float array, checking the dimension"""
    arr = point.as_array() if isinstance(point, TorusPoint) else np.asarray(point, dtype=float)
    arr = np.atleast_1d(arr)
    if arr.shape[-1] != spec.n:
        raise DimensionMismatchError(f"expected {spec.n} coordinates, got {arr.shape[-1]}")
    return arr


def reduce(raw: np.ndarray, R: float) -> np.ndarray:
    """Reduce coordinates into [0, R) elementwise."""
    out = np.mod(raw, R)
    # np.mod can round tiny negatives up to exactly R
    out[out >= R] = 0.0
    return out


def wrap(raw: PointLike, spec: TorusSpec) -> TorusPoint:
    coords = as_coords(raw, spec)
    if coords.ndim != 1:
        raise DimensionMismatchError("wrap expects a single point")
    return TorusPoint(tuple(float(c) for c in reduce(coords.copy(), spec.R)))


def displacement(a: np.ndarray, b: np.ndarray, R: float) -> np.ndarray:
    """Signed minimum-image displacement b - a per axis, in [-R/2, R/2]. Broadcasts."""
    d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    return d - R * np.round(d / R)


def axis_gaps(a: np.ndarray, b: np.ndarray, R: float) -> np.ndarray:
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % R
    return np.minimum(d, R - d)


def torus_distance(a: PointLike, b: PointLike, spec: TorusSpec) -> float:
    gaps = axis_gaps(as_coords(a, spec), as_coords(b, spec), spec.R)
    return float(np.sqrt(np.sum(gaps * gaps)))


def distances_to(coords: np.ndarray, q: np.ndarray, R: float) -> np.ndarray:
    """Torus distances from every row of coords to the single point q"""
    gaps = axis_gaps(coords, q[None, :], R)
    return np.sqrt(np.sum(gaps * gaps, axis=-1))


def pairwise_distances(coords: np.ndarray, R: float) -> np.ndarray:
    gaps = axis_gaps(coords[:, None, :], coords[None, :, :], R)
    return np.sqrt(np.sum(gaps * gaps, axis=-1))


def nearest_lift(center: PointLike, other: PointLike, spec: TorusSpec) -> np.ndarray:
    """Representative of `other` in E^n closest to the representative of `center`."""
    c = as_coords(center, spec)
    delta = np.mod(as_coords(other, spec) - c, spec.R)
    half = spec.R / 2
    for axis, value in enumerate(delta):
        if abs(value - half) <= TAU:
            raise AmbiguousLiftError(axis, float(value))
    delta = np.where(delta > half, delta - spec.R, delta)
    return c + delta


def shift_lift_distance(a: PointLike, b: PointLike, spec: TorusSpec) -> float:
    """Minimum Euclidean distance over the 3^n integer-shift lifts of b; brute force"""
    pa = np.asarray(wrap(a, spec).coords)
    pb = np.asarray(wrap(b, spec).coords)
    best = np.inf
    for shift in itertools.product((-1, 0, 1), repeat=spec.n):
        best = min(best, float(np.linalg.norm(pb + spec.R * np.asarray(shift) - pa)))
    return best
