from typing import List

import numpy as np

from app.geometry.coloring import Coloring, ColoringConfig
from app.geometry.separated import SeparatedSet
from app.geometry.torus import TorusSpec, distances_to

# strictly above the 5/3 exclusion radius
SPREAD = 1.7


def forced_coloring(separated: SeparatedSet, s_ids, x: float = 0.5, seed: int = 0) -> Coloring:
    """Coloring with a hand-picked S (and Q = S), bypassing the random draw"""
    bits = np.zeros(len(separated), dtype=bool)
    bits[list(s_ids)] = True
    config = ColoringConfig(spec=separated.spec, t=separated.t, x=x, seed=seed)
    return Coloring(config, separated, bits, bits.copy())


def spread_site_ids(separated: SeparatedSet, radius: float = SPREAD) -> List[int]:
    """Greedy sites of P pairwise more than `radius` apart on the torus"""
    chosen: List[int] = []
    for i, p in enumerate(separated.coords):
        if not chosen or distances_to(separated.coords[chosen], p, separated.spec.R).min() > radius:
            chosen.append(i)
    return chosen


def hand_set(n: int, R: float, points, t: float = 1.0 / 3.0, allow_small_R: bool = False) -> SeparatedSet:
    spec = TorusSpec(n=n, R=R, allow_small_R=allow_small_R)
    return SeparatedSet.from_points(spec, t, points)
