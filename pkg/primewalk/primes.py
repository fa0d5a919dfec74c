"""Prime generation, prime counts, gaps and last-digit pair statistics.

Primes are produced by a segmented sieve of Eratosthenes, one window of
``segment_size`` candidates at a time, so memory stays at O(segment + sqrt(limit)).
Every statistic is computed per window as a ``SegmentSummary`` and the summaries are
merged in order, which lets the same code run in-process or spread over celery
workers (see ``primewalk.algos``).
"""

import logging
from collections import deque
from functools import reduce
from itertools import islice
from math import isqrt, log
from typing import Iterable, Iterator, Optional

import numpy as np

from .config import settings
from .exceptions import ConfigurationError, EmptyInputError
from .models import (
    TAIL_DIGITS,
    GapHistogram,
    LastDigit,
    PairMatrix,
    SegmentSummary,
    SieveConfig,
)
from .utils import _base_primes, _segment_bounds, _sieve_window

logger = logging.getLogger(__name__)

__all__ = [
    "iter_segments",
    "primes_up_to",
    "is_prime_reference",
    "prime_count",
    "n_over_ln_n",
    "last_digit",
    "summarize",
    "merge_summaries",
    "prime_summary",
    "histogram_from_summary",
    "matrix_from_summary",
    "gap_histogram",
    "pair_matrix",
    "pair_matrix_up_to",
]

# PairMatrix row/column of each last digit; -1 marks 0, 2, 4, 5, 6, 8
_TAIL_INDEX = np.full(10, -1, dtype=np.int64)
_TAIL_INDEX[list(TAIL_DIGITS)] = np.arange(4)


def iter_segments(
    config: SieveConfig, start: int = 2, dispatch: Optional[bool] = None
) -> Iterator[np.ndarray]:
    """Yield the primes in start..config.limit as int64 arrays, one per window.

    Params:
        config: Sieve limit and window size.
        start: First candidate considered.
        dispatch: Sieve windows on celery workers. Defaults to
            settings.primewalk_dispatch_segments. Windows are yielded in increasing
            order either way.
    """
    bounds = _segment_bounds(start, config.limit, config.segment_size)
    if not bounds:
        return
    if settings.primewalk_dispatch_segments if dispatch is None else dispatch:
        yield from _dispatched_segments(bounds)
        return
    base = _base_primes(isqrt(config.limit))
    for lo, hi in bounds:
        logger.debug("Sieving [%d, %d)", lo, hi)
        yield _sieve_window(lo, hi, base)


def _dispatched_segments(
    bounds: list[tuple[int, int]], window: Optional[int] = None
) -> Iterator[np.ndarray]:
    """Keep a bounded number of sieve tasks in flight and yield results in order"""
    # Import here so in-process use never touches the celery app
    from .tasks import sieve_segment

    window = window or settings.primewalk_prefetch_window
    remaining = iter(bounds)
    pending = deque(sieve_segment.delay(lo, hi) for lo, hi in islice(remaining, window))
    logger.info("Dispatching %d sieve segments to workers", len(bounds))
    try:
        while pending:
            future = pending[0]
            nxt = next(remaining, None)
            if nxt is not None:
                pending.append(sieve_segment.delay(*nxt))
            segment = future.get()
            pending.popleft()
            future.forget()
            yield segment
    finally:
        # Consumer stopped early or a task failed
        if pending:
            logger.info("Discarding %d in-flight sieve segments", len(pending))
        for future in pending:
            future.revoke()
            future.forget()


def primes_up_to(config: SieveConfig, start: int = 2) -> Iterator[int]:
    """Every prime in start..config.limit exactly once, in increasing order"""
    for segment in iter_segments(config, start):
        yield from segment.tolist()


def is_prime_reference(n: int) -> bool:
    """Trial division by 2, 3 and then candidates 6k - 1, 6k + 1 up to sqrt(n).

    Slow. Used as the independent oracle for the sieve.
    """
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    m = 5
    while m * m <= n:
        if n % m == 0 or n % (m + 2) == 0:
            return False
        m += 6
    return True


def prime_count(limit: int, segment_size: Optional[int] = None) -> int:
    """Exact pi(limit) by enumeration"""
    if limit < 2:
        return 0
    config = SieveConfig(limit=limit, **_size(segment_size))
    return sum(len(segment) for segment in iter_segments(config))


def n_over_ln_n(n: int) -> float:
    """The asymptotic estimate n / ln n of pi(n). NaN below 2."""
    return n / log(n) if n >= 2 else float("nan")


def last_digit(p: int) -> LastDigit:
    """Last decimal digit of a prime; 2 and 5 come back flagged as exceptional"""
    assert p in (2, 5) or (p > 2 and p % 10 in TAIL_DIGITS), f"{p} is not prime"
    return LastDigit(p % 10)


def summarize(primes: np.ndarray, lo: int, hi: int) -> SegmentSummary:
    """Gap and last-digit pair counts of the sorted primes of the window [lo, hi)"""
    if len(primes) == 0:
        return SegmentSummary(lo=lo, hi=hi)
    gaps, gap_counts = np.unique(np.diff(primes), return_counts=True)
    index = _TAIL_INDEX[primes % 10]
    tails = primes[index >= 0]
    index = index[index >= 0]
    pairs = np.bincount(index[:-1] * 4 + index[1:], minlength=16).reshape(4, 4)
    return SegmentSummary(
        lo=lo,
        hi=hi,
        count=len(primes),
        first=int(primes[0]),
        last=int(primes[-1]),
        first_tail=int(tails[0]) if len(tails) else None,
        last_tail=int(tails[-1]) if len(tails) else None,
        gap_counts=dict(zip(gaps.tolist(), gap_counts.tolist())),
        pair_counts=pairs.tolist(),
    )


def _merge_two(left: SegmentSummary, right: SegmentSummary) -> SegmentSummary:
    if left.hi != right.lo:
        raise ConfigurationError(
            f"Cannot merge non-adjacent ranges [{left.lo}, {left.hi}) and "
            f"[{right.lo}, {right.hi})"
        )
    gaps = dict(left.gap_counts)
    for gap, count in right.gap_counts.items():
        gaps[gap] = gaps.get(gap, 0) + count
    pairs = [
        [a + b for a, b in zip(row_l, row_r)]
        for row_l, row_r in zip(left.pair_counts, right.pair_counts)
    ]
    # Gap and digit pair straddling the boundary
    if left.last is not None and right.first is not None:
        gap = right.first - left.last
        gaps[gap] = gaps.get(gap, 0) + 1
    if left.last_tail is not None and right.first_tail is not None:
        i = TAIL_DIGITS.index(left.last_tail % 10)
        j = TAIL_DIGITS.index(right.first_tail % 10)
        pairs[i][j] += 1

    return SegmentSummary(
        lo=left.lo,
        hi=right.hi,
        count=left.count + right.count,
        first=left.first if left.first is not None else right.first,
        last=right.last if right.last is not None else left.last,
        first_tail=left.first_tail if left.first_tail is not None else right.first_tail,
        last_tail=right.last_tail if right.last_tail is not None else left.last_tail,
        gap_counts=gaps,
        pair_counts=pairs,
    )


def merge_summaries(summaries: Iterable[SegmentSummary]) -> SegmentSummary:
    """Fold summaries of consecutive, adjacent ranges into one"""
    summaries = list(summaries)
    if not summaries:
        raise EmptyInputError("No segment summaries to merge")
    return reduce(_merge_two, summaries)


def prime_summary(limit: int, segment_size: Optional[int] = None) -> SegmentSummary:
    """SegmentSummary of every prime <= limit, computed in-process"""
    config = SieveConfig(limit=limit, **_size(segment_size))
    bounds = _segment_bounds(2, config.limit, config.segment_size)
    if not bounds:
        return SegmentSummary(lo=2, hi=2)
    segments = iter_segments(config, dispatch=False)
    return merge_summaries(
        summarize(segment, lo, hi) for segment, (lo, hi) in zip(segments, bounds)
    )


def histogram_from_summary(summary: SegmentSummary) -> GapHistogram:
    counts = dict(sorted(summary.gap_counts.items()))
    return GapHistogram(counts=counts, max_gap=max(counts, default=0))


def matrix_from_summary(summary: SegmentSummary) -> PairMatrix:
    return PairMatrix(
        counts=summary.pair_counts,
        total=sum(sum(row) for row in summary.pair_counts),
    )


def gap_histogram(limit: int, segment_size: Optional[int] = None) -> GapHistogram:
    """Counts of p_i+1 - p_i over consecutive primes <= limit, 3 - 2 = 1 included"""
    return histogram_from_summary(prime_summary(limit, segment_size))


def pair_matrix_up_to(limit: int, segment_size: Optional[int] = None) -> PairMatrix:
    """Last-digit pair counts over the primes <= limit"""
    return matrix_from_summary(prime_summary(limit, segment_size))


def pair_matrix(first_m_primes: int, segment_size: Optional[int] = None) -> PairMatrix:
    """Consecutive last-digit pair counts over the first m primes.

    2 and 5 are skipped entirely, so the first counted pair is (3, 7).
    """
    if first_m_primes < 2:
        raise ConfigurationError(f"first_m_primes must be >= 2, got {first_m_primes}")
    config = SieveConfig(
        limit=_nth_prime_upper_bound(first_m_primes), **_size(segment_size)
    )
    base = _base_primes(isqrt(config.limit))
    summaries = []
    remaining = first_m_primes
    for lo, hi in _segment_bounds(2, config.limit, config.segment_size):
        segment = _sieve_window(lo, hi, base)
        if len(segment) >= remaining:
            segment = segment[:remaining]
            summaries.append(summarize(segment, lo, int(segment[-1]) + 1))
            break
        summaries.append(summarize(segment, lo, hi))
        remaining -= len(segment)
    return matrix_from_summary(merge_summaries(summaries))


def _nth_prime_upper_bound(m: int) -> int:
    """Rosser's bound p_m < m (ln m + ln ln m) for m >= 6"""
    if m < 6:
        return 13
    return int(m * (log(m) + log(log(m)))) + 1


def _size(segment_size: Optional[int]) -> dict:
    return {} if segment_size is None else {"segment_size": segment_size}
