"""Seed-derived random streams.

Per-member draws come from a Philox generator keyed on the seed, so member i
always reads the i-th output. Monte Carlo loops are cut into fixed-size chunks,
each with its own stream keyed on (seed, label, chunk index); results are merged
in chunk order, so they never depend on how many workers ran the chunks.
"""
import hashlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

import numpy as np

from app.config import SETTINGS, default_workers

T = TypeVar("T")


def label_key(label: str) -> int:
    return int.from_bytes(hashlib.blake2b(label.encode(), digest_size=8).digest(), "little")


def member_uniforms(seed: int, count: int, label: str = "membership") -> np.ndarray:
    """Uniform [0, 1) draw for each member id 0..count-1"""
    key = np.random.SeedSequence([seed, label_key(label)])
    return np.random.Generator(np.random.Philox(key)).random(count)


def stream(seed: int, label: str, *index: int) -> np.random.Generator:
    return np.random.default_rng([seed, label_key(label), *index])


def run_chunked(total: int, fn: Callable[[int, int, int], T], workers: Optional[int] = None,
                chunk_size: Optional[int] = None) -> List[T]:
    """Call fn(chunk_index, start, stop) over [0, total) in fixed chunks; results in chunk order."""
    size = chunk_size or SETTINGS["search"]["chunk_size"]
    spans = [(i, start, min(start + size, total)) for i, start in enumerate(range(0, total, size))]
    workers = workers or default_workers()
    if workers <= 1 or len(spans) <= 1:
        return [fn(*span) for span in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda span: fn(*span), spans))


def first_hit(total: int, fn: Callable[[int, int, int], Optional[T]], workers: Optional[int] = None,
              chunk_size: Optional[int] = None) -> Optional[T]:
    """Earliest non-None chunk result, scanning chunks in waves of `workers`."""
    size = chunk_size or SETTINGS["search"]["chunk_size"]
    workers = workers or default_workers()
    spans = [(i, start, min(start + size, total)) for i, start in enumerate(range(0, total, size))]
    for wave in range(0, len(spans), workers):
        batch = spans[wave:wave + workers]
        if workers <= 1 or len(batch) <= 1:
            results = [fn(*span) for span in batch]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda span: fn(*span), batch))
        for result in results:
            if result is not None:
                return result
    return None
