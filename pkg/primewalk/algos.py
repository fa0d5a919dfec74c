"""Top level functions for parallelized prime statistics"""

from typing import Optional

from celery.canvas import Signature, group

from .config import settings
from .models import SieveConfig
from .tasks import (
    count_from_summary,
    gap_histogram_from_summary,
    merge_summaries,
    pair_matrix_from_summary,
    summarize_segment,
)
from .utils import _segment_bounds

__all__ = [
    "parallel_prime_summary",
    "parallel_prime_count",
    "parallel_gap_histogram",
    "parallel_pair_matrix",
]


def parallel_prime_summary(
    limit: int, segment_size: Optional[int] = None
) -> Signature:
    """Create a signature summarizing every prime <= limit

    Params:
        limit: Inclusive upper bound on primes.
        segment_size: Candidates per window. Defaults to
            settings.primewalk_segment_size.

    Note: Creates a Celery Chord where each window is sieved and summarized in
        parallel, then the list of summaries is merged in window order. The result is
        a SegmentSummary identical to primes.prime_summary(limit).
    """
    config = SieveConfig(
        limit=limit,
        segment_size=segment_size or settings.primewalk_segment_size,
    )
    bounds = _segment_bounds(2, config.limit, config.segment_size)
    assert bounds, f"limit must be >= 2 to have any candidates, got {limit}"

    # | is chain operator in celery
    return group(
        summarize_segment.s(lo, hi) for lo, hi in bounds
    ) | merge_summaries.s()


def parallel_prime_count(limit: int, segment_size: Optional[int] = None) -> Signature:
    """Create a signature computing pi(limit)"""
    return parallel_prime_summary(limit, segment_size) | count_from_summary.s()


def parallel_gap_histogram(
    limit: int, segment_size: Optional[int] = None
) -> Signature:
    """Create a signature computing the GapHistogram of the primes <= limit"""
    return parallel_prime_summary(limit, segment_size) | gap_histogram_from_summary.s()


def parallel_pair_matrix(limit: int, segment_size: Optional[int] = None) -> Signature:
    """Create a signature computing the last-digit PairMatrix of the primes <= limit"""
    return parallel_prime_summary(limit, segment_size) | pair_matrix_from_summary.s()
