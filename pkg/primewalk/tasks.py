import numpy as np
from celery.utils.log import get_task_logger

from .app import primewalk
from .models import GapHistogram, PairMatrix, SegmentSummary
from .primes import histogram_from_summary, matrix_from_summary
from .primes import merge_summaries as _merge_summaries
from .primes import summarize as _summarize
from .utils import _sieve_window

logger = get_task_logger(__name__)

__all__ = [
    "sieve_segment",
    "summarize_segment",
    "merge_summaries",
    "count_from_summary",
    "gap_histogram_from_summary",
    "pair_matrix_from_summary",
]


@primewalk.task
def sieve_segment(lo: int, hi: int) -> np.ndarray:
    """Primes in the window [lo, hi) as an int64 array"""
    logger.debug("Sieving [%d, %d)", lo, hi)
    return _sieve_window(lo, hi)


@primewalk.task
def summarize_segment(lo: int, hi: int) -> SegmentSummary:
    """Sieve the window [lo, hi) and reduce it to its mergeable summary"""
    return _summarize(_sieve_window(lo, hi), lo, hi)


@primewalk.task
def merge_summaries(summaries: list[SegmentSummary]) -> SegmentSummary:
    """Fold window summaries into one

    NOTE: Used as the body of a chord. Celery hands the header results over in the
        order the header tasks were declared, not the order they finished.
    """
    logger.info("Merging %d segment summaries", len(summaries))
    return _merge_summaries(summaries)


@primewalk.task
def count_from_summary(summary: SegmentSummary) -> int:
    return summary.count


@primewalk.task
def gap_histogram_from_summary(summary: SegmentSummary) -> GapHistogram:
    return histogram_from_summary(summary)


@primewalk.task
def pair_matrix_from_summary(summary: SegmentSummary) -> PairMatrix:
    return matrix_from_summary(summary)
