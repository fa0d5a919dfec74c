from types import SimpleNamespace

import numpy as np
import pytest

from primewalk import tasks
from primewalk.algos import (
    parallel_gap_histogram,
    parallel_pair_matrix,
    parallel_prime_count,
    parallel_prime_summary,
)
from primewalk.app import primewalk as app
from primewalk.models import SieveConfig
from primewalk.primes import (
    _dispatched_segments,
    gap_histogram,
    is_prime_reference,
    pair_matrix_up_to,
    prime_summary,
    primes_up_to,
)
from primewalk.tasks import merge_summaries, sieve_segment, summarize_segment
from primewalk.utils import _segment_bounds, _sieve_window
from primewalk.walk import Walker


def test_sieve_segment():
    # Testing task in foreground since no worker is required
    assert sieve_segment(2, 30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert sieve_segment(90, 97).size == 0
    assert sieve_segment(10**6, 10**6 + 100).dtype == np.int64


def test_summarize_and_merge_segments():
    bounds = [(2, 1000), (1000, 5000), (5000, 10001)]
    summaries = [summarize_segment(lo, hi) for lo, hi in bounds]
    assert [s.count for s in summaries] == [168, 501, 560]

    merged = merge_summaries(summaries)
    assert merged == prime_summary(10**4)


@pytest.mark.parametrize("segment_size", (1000, 4096, 10**5))
def test_parallel_prime_summary_eager(segment_size):
    result = parallel_prime_summary(10**4, segment_size=segment_size).apply().get()
    assert result == prime_summary(10**4)


def test_parallel_prime_count_eager():
    assert parallel_prime_count(10**4, segment_size=1000).apply().get() == 1229
    assert parallel_prime_count(2, segment_size=1000).apply().get() == 1


def test_parallel_gap_histogram_eager():
    histogram = parallel_gap_histogram(10**5, segment_size=3000).apply().get()
    assert histogram == gap_histogram(10**5)


def test_parallel_pair_matrix_eager():
    matrix = parallel_pair_matrix(10**5, segment_size=3000).apply().get()
    assert matrix == pair_matrix_up_to(10**5)


def test_parallel_prime_summary_needs_candidates():
    with pytest.raises(AssertionError):
        parallel_prime_summary(1)


def test_dispatched_walk_matches_in_process_walk(monkeypatch):
    monkeypatch.setitem(app.conf, "task_always_eager", True)
    dispatched = Walker(arrivals=True)
    snapshots = dispatched.run(20000, cadence=1000, segment_size=1500, dispatch=True)

    local = Walker(arrivals=True)
    assert snapshots == local.run(20000, cadence=1000, segment_size=1500)
    assert dispatched.grid == local.grid
    assert dispatched.arrivals == local.arrivals


class FakeResult:
    """Stands in for an AsyncResult of sieve_segment"""

    def __init__(self, lo, hi):
        self.bounds = (lo, hi)
        self.forgotten = False
        self.revoked = False

    def get(self):
        return _sieve_window(*self.bounds)

    def forget(self):
        self.forgotten = True

    def revoke(self):
        self.revoked = True


def test_dispatched_segments_cleans_up_when_closed_early(monkeypatch):
    submitted = []

    def delay(lo, hi):
        submitted.append(FakeResult(lo, hi))
        return submitted[-1]

    monkeypatch.setattr(tasks, "sieve_segment", SimpleNamespace(delay=delay))
    segments = _dispatched_segments(_segment_bounds(2, 1000, 100), window=3)
    expected = [p for p in range(2, 102) if is_prime_reference(p)]
    assert next(segments).tolist() == expected
    segments.close()

    assert len(submitted) == 4
    assert all(result.forgotten for result in submitted)
    assert [result.revoked for result in submitted] == [False, True, True, True]


def test_dispatched_segments_in_order(monkeypatch):
    submitted = []

    def delay(lo, hi):
        submitted.append(FakeResult(lo, hi))
        return submitted[-1]

    monkeypatch.setattr(tasks, "sieve_segment", SimpleNamespace(delay=delay))
    bounds = _segment_bounds(2, 1000, 100)
    segments = list(_dispatched_segments(bounds, window=3))

    expected = list(primes_up_to(SieveConfig(limit=1000)))
    assert np.concatenate(segments).tolist() == expected
    assert [result.bounds for result in submitted] == bounds
    assert not any(result.revoked for result in submitted)
