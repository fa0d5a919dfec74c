"""Helper functions not for end users"""

import os
import tempfile
from contextlib import contextmanager
from functools import lru_cache
from math import isqrt
from pathlib import Path
from typing import IO, Iterator, Optional, Union

import numpy as np


def _segment_bounds(start: int, limit: int, segment_size: int) -> list[tuple[int, int]]:
    """Split the candidates start..limit into half-open windows [lo, hi)

    Params:
        start: First candidate. Values below 2 are raised to 2.
        limit: Inclusive upper bound on candidates.
        segment_size: Candidates per window.

    Returns:
        Consecutive, non-overlapping windows covering max(start, 2)..limit. Empty if
            there are no candidates.
    """
    lo = max(start, 2)
    bounds = []
    while lo <= limit:
        hi = min(lo + segment_size, limit + 1)
        bounds.append((lo, hi))
        lo = hi
    return bounds


@lru_cache(maxsize=8)
def _base_primes(bound: int) -> np.ndarray:
    """All primes <= bound using a plain sieve. Used to cross out segment multiples."""
    if bound < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(bound + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, isqrt(bound) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    primes = np.flatnonzero(is_prime).astype(np.int64)
    primes.flags.writeable = False
    return primes


def _sieve_window(lo: int, hi: int, base: Optional[np.ndarray] = None) -> np.ndarray:
    """Primes p with lo <= p < hi as an int64 array

    Params:
        base: Sorted primes covering at least sqrt(hi - 1). Computed when omitted.
    """
    lo = max(lo, 2)
    if hi <= lo:
        return np.empty(0, dtype=np.int64)
    if base is None:
        base = _base_primes(isqrt(hi - 1))
    mask = np.ones(hi - lo, dtype=bool)
    for p in base.tolist():
        square = p * p
        if square >= hi:
            break
        first = max(square, -(-lo // p) * p)
        mask[first - lo :: p] = False
    return np.flatnonzero(mask).astype(np.int64) + lo


@contextmanager
def _atomic_open(
    path: Union[str, Path], mode: str = "w", newline: Union[str, None] = ""
) -> Iterator[IO]:
    """Write to a temporary file next to path and rename it over path on success"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    binary = "b" in mode
    try:
        with os.fdopen(
            fd,
            mode,
            **({} if binary else {"encoding": "utf-8", "newline": newline}),
        ) as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
