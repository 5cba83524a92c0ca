"""Text formats for point sets and colorings.

Point set: a header ``n R t count`` followed by one line of n coordinates per
site. A coloring file appends ``x seed tie_tol`` and two lines with the ascending
ids of Q and of S. Floats are written with repr so they read back exactly.
"""
import logging
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from pydantic import ValidationError

from app.errors import StorageError
from app.geometry.coloring import Coloring, ColoringConfig
from app.geometry.separated import SeparatedSet
from app.geometry.torus import TorusSpec

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _fmt(value: float) -> str:
    return repr(float(value))


def _ids_line(bits: np.ndarray) -> str:
    return " ".join(str(int(i)) for i in np.flatnonzero(bits))


def _point_lines(separated: SeparatedSet) -> List[str]:
    spec = separated.spec
    lines = [f"{spec.n} {_fmt(spec.R)} {_fmt(separated.t)} {len(separated)}"]
    lines.extend(" ".join(_fmt(c) for c in row) for row in separated.coords)
    return lines


def write_point_set(separated: SeparatedSet, path: PathLike) -> None:
    _write(path, _point_lines(separated))


def write_coloring(coloring: Coloring, path: PathLike) -> None:
    config = coloring.config
    lines = _point_lines(coloring.separated)
    lines.append(f"{_fmt(config.x)} {config.seed} {_fmt(config.tie_tol)}")
    lines.append(_ids_line(coloring.q_bits))
    lines.append(_ids_line(coloring.s_bits))
    _write(path, lines)


def _write(path: PathLike, lines: List[str]) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote %s", path)


def _read_lines(path: PathLike) -> List[str]:
    try:
        return Path(path).read_text().splitlines()
    except OSError as exc:
        raise StorageError(f"cannot read {path}: {exc}") from exc


def _parse_points(lines: List[str], path: PathLike) -> Tuple[SeparatedSet, int]:
    try:
        n_s, R_s, t_s, count_s = lines[0].split()
        n, R, t, count = int(n_s), float(R_s), float(t_s), int(count_s)
        rows = [[float(v) for v in line.split()] for line in lines[1:1 + count]]
    except (IndexError, ValueError) as exc:
        raise StorageError(f"{path}: malformed point-set header or coordinates") from exc
    if count < 1 or len(rows) != count or any(len(row) != n for row in rows):
        raise StorageError(f"{path}: expected {count} rows of {n} coordinates")
    try:
        spec = TorusSpec(n=n, R=R, allow_small_R=R <= 2)
    except ValidationError as exc:
        raise StorageError(f"{path}: invalid torus parameters n={n} R={R}") from exc
    coords = np.asarray(rows, dtype=float).reshape(count, n)
    return SeparatedSet(spec=spec, t=t, coords=coords), 1 + count


def read_point_set(path: PathLike) -> SeparatedSet:
    """Load an uncertified point set; certify() attaches a covering certificate"""
    separated, _ = _parse_points(_read_lines(path), path)
    return separated


def read_coloring(path: PathLike) -> Coloring:
    lines = _read_lines(path)
    separated, used = _parse_points(lines, path)
    tail = lines[used:] + ["", ""]
    try:
        x_s, seed_s, tol_s = tail[0].split()
        config = ColoringConfig(spec=separated.spec, t=separated.t, x=float(x_s),
                                seed=int(seed_s), tie_tol=float(tol_s))
        q_ids = [int(v) for v in tail[1].split()]
        s_ids = [int(v) for v in tail[2].split()]
    except (ValueError, ValidationError) as exc:
        raise StorageError(f"{path}: malformed coloring section") from exc
    size = len(separated)
    if any(not 0 <= i < size for i in q_ids + s_ids):
        raise StorageError(f"{path}: member id out of range 0..{size - 1}")
    if not set(s_ids) <= set(q_ids):
        raise StorageError(f"{path}: S lists ids that are not in Q")
    q_bits = np.zeros(size, dtype=bool)
    q_bits[q_ids] = True
    s_bits = np.zeros(size, dtype=bool)
    s_bits[s_ids] = True
    return Coloring(config, separated, q_bits, s_bits)
