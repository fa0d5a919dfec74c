"""The deterministic Prime Walk (PW) and its seeded pseudo-random baseline (pRW).

Integers are assigned to lattice cells in order, starting with N = 1 at (0, 0). When
N + 1 is prime the walker first moves, then N + 1 is assigned to the new cell:

    last digit 1 -> up, 3 -> down, 7 -> left, 9 -> right, primes 2 and 5 -> stay

The pRW instead draws a uniformly random direction at every prime, 2 and 5 included.

The loop only touches primes. Between two primes the walker dwells on one cell, so
the whole run of integers is added at once and split only where a snapshot or an
interval boundary falls inside it.
"""

import logging
import random
from types import MappingProxyType
from typing import Mapping, Optional

from .config import settings
from .exceptions import ConfigurationError, FitError
from .grid import VisitGrid
from .models import (
    TAIL_DIGITS,
    GridCoord,
    IntervalRecord,
    Move,
    PrngSpec,
    SieveConfig,
    WalkSnapshot,
)
from .primes import iter_segments, last_digit
from .stats import box_count

logger = logging.getLogger(__name__)

__all__ = [
    "DIGIT_MOVES",
    "RANDOM_MOVES",
    "Walker",
    "step_for_prime",
    "run_pw",
    "run_prw",
    "arrival_count_mode",
]

DIGIT_MOVES: Mapping[int, Move] = MappingProxyType(
    {1: Move.up, 3: Move.down, 7: Move.left, 9: Move.right}
)

# Indexed by getrandbits(2)
RANDOM_MOVES = (Move.up, Move.down, Move.left, Move.right)
_RANDOM_DELTAS = tuple(move.delta for move in RANDOM_MOVES)


def step_for_prime(p: int, moves: Mapping[int, Move] = DIGIT_MOVES) -> Move:
    """Move of the Prime Walk at prime p. 2 and 5 leave the walker in place."""
    return moves.get(last_digit(p), Move.stay)


class Walker:
    """A PW or pRW paused between integer steps.

    Integers 1..n have been assigned and the walker sits on the cell of n. ``run``
    continues the walk; ``primewalk.checkpoint`` saves and restores it exactly.

    Params:
        prng: Generator for the pseudo-random walk. None runs the Prime Walk.
        arrivals: Also count arrivals, i.e. one visit per move instead of one per
            integer.
        interval: Close an IntervalRecord every this many integers.
        moves: Digit to move table of the Prime Walk. Any rotation or reflection of
            the default table gives the same walk rotated or reflected.
    """

    def __init__(
        self,
        prng: Optional[PrngSpec] = None,
        *,
        arrivals: bool = False,
        interval: Optional[int] = None,
        moves: Optional[Mapping[int, Move]] = None,
    ):
        if prng is not None and moves is not None:
            raise ConfigurationError("A digit to move table only applies to the PW")
        if interval is not None and interval < 1:
            raise ConfigurationError(f"interval must be >= 1, got {interval}")
        table = dict(DIGIT_MOVES if moves is None else moves)
        if sorted(table) != list(TAIL_DIGITS):
            raise ConfigurationError(
                f"moves must map exactly the digits {TAIL_DIGITS}, got {sorted(table)}"
            )

        self.prng = prng
        self.moves = table
        self.n = 0
        self.x = 0
        self.y = 0
        self.primes_seen = 0
        self.grid = VisitGrid()
        self.arrivals: Optional[VisitGrid] = VisitGrid() if arrivals else None
        self.interval = interval
        self.interval_start = 0
        self.interval_grid: Optional[VisitGrid] = VisitGrid() if interval else None
        # IntervalRecords closed by this object. Not part of checkpoints.
        self.intervals: list[IntervalRecord] = []
        self.rng: Optional[random.Random] = (
            random.Random(prng.seed) if prng is not None else None
        )
        self._deltas = {digit: move.delta for digit, move in table.items()}

    @property
    def mode(self) -> str:
        return "pw" if self.prng is None else "prw"

    @property
    def position(self) -> GridCoord:
        return GridCoord(self.x, self.y)

    def snapshot(self) -> WalkSnapshot:
        grid = self.grid
        min_x, max_x, min_y, max_y = grid.bbox
        return WalkSnapshot(
            n=self.n,
            x=self.x,
            y=self.y,
            area=grid.area,
            z_max=grid.z_max,
            bbox_min_x=min_x,
            bbox_max_x=max_x,
            bbox_min_y=min_y,
            bbox_max_y=max_y,
            interior_unvisited=grid.interior_unvisited,
            pi_n=self.primes_seen,
        )

    def run(
        self,
        limit: int,
        cadence: Optional[int] = None,
        *,
        segment_size: Optional[int] = None,
        dispatch: Optional[bool] = None,
    ) -> list[WalkSnapshot]:
        """Assign the integers n+1..limit.

        Params:
            limit: Last integer to assign.
            cadence: Snapshot at every multiple of cadence. Defaults to
                settings.primewalk_cadence.
            segment_size: Sieve window size.
            dispatch: Sieve on celery workers. See primes.iter_segments.

        Returns:
            Snapshots at each multiple of cadence in (n, limit] and at limit.
        """
        cadence = settings.primewalk_cadence if cadence is None else cadence
        if limit < 1:
            raise ConfigurationError("limit must be >= 1; N = 1 is the start cell")
        if cadence < 1:
            raise ConfigurationError(f"cadence must be >= 1, got {cadence}")
        if limit < self.n:
            raise ConfigurationError(
                f"Walker is already at n={self.n} and cannot run back to {limit}"
            )
        snapshots: list[WalkSnapshot] = []
        if limit == self.n:
            return snapshots

        logger.info(
            "Running %s from n=%d to n=%d (cadence %d)",
            self.mode,
            self.n,
            limit,
            cadence,
        )
        if self.n == 0 and self.arrivals is not None:
            self.arrivals.add((0, 0), 1)

        config = SieveConfig(
            limit=limit,
            **({} if segment_size is None else {"segment_size": segment_size}),
        )
        next_snapshot = (self.n // cadence + 1) * cadence
        for segment in iter_segments(config, start=self.n + 1, dispatch=dispatch):
            for p in segment.tolist():
                next_snapshot = self._advance(p - 1, cadence, next_snapshot, snapshots)
                self._step(p)
        self._advance(limit, cadence, next_snapshot, snapshots)
        if not snapshots or snapshots[-1].n != limit:
            snapshots.append(self.snapshot())

        logger.info(
            "Finished %s at n=%d: area=%d z_max=%d pi_n=%d",
            self.mode,
            self.n,
            self.grid.area,
            self.grid.z_max,
            self.primes_seen,
        )
        return snapshots

    def _advance(
        self, m: int, cadence: int, next_snapshot: int, snapshots: list[WalkSnapshot]
    ) -> int:
        """Assign n+1..m to the current cell. Returns the next snapshot point."""
        cell = (self.x, self.y)
        while self.n < m:
            stop = m if m < next_snapshot else next_snapshot
            if self.interval_grid is not None:
                boundary = self.interval_start + (self.interval or 0)
                if boundary < stop:
                    stop = boundary
            count = stop - self.n
            self.grid.add(cell, count)
            if self.interval_grid is not None:
                self.interval_grid.add(cell, count)
            self.n = stop
            if stop == next_snapshot:
                snapshot = self.snapshot()
                logger.debug("Snapshot %s", snapshot)
                snapshots.append(snapshot)
                next_snapshot += cadence
            if (
                self.interval_grid is not None
                and stop == self.interval_start + (self.interval or 0)
            ):
                self._close_interval()
        return next_snapshot

    def _step(self, p: int) -> None:
        """Move for prime p, which is assigned next"""
        self.primes_seen += 1
        if self.rng is not None:
            dx, dy = _RANDOM_DELTAS[self.rng.getrandbits(2)]
        else:
            delta = self._deltas.get(p % 10)
            if delta is None:
                return
            dx, dy = delta
            if not (dx or dy):
                return
        self.x += dx
        self.y += dy
        if self.arrivals is not None:
            self.arrivals.add((self.x, self.y), 1)

    def _close_interval(self) -> None:
        grid = self.interval_grid
        assert grid is not None
        try:
            d_f: Optional[float] = box_count(grid).d_f
        except FitError:
            d_f = None
        record = IntervalRecord(
            start=self.interval_start,
            end=self.n,
            z_max=grid.z_max,
            area=grid.area,
            d_f=d_f,
        )
        logger.info("Closed interval %s", record)
        self.intervals.append(record)
        self.interval_start = self.n
        self.interval_grid = VisitGrid()


def run_pw(
    limit: int,
    cadence: Optional[int] = None,
    *,
    moves: Optional[Mapping[int, Move]] = None,
    interval: Optional[int] = None,
    segment_size: Optional[int] = None,
) -> tuple[VisitGrid, list[WalkSnapshot]]:
    """Run the Prime Walk over 1..limit. Returns the dwell grid and the snapshots."""
    walker = Walker(moves=moves, interval=interval)
    snapshots = walker.run(limit, cadence, segment_size=segment_size)
    return walker.grid, snapshots


def run_prw(
    limit: int,
    prng: PrngSpec,
    cadence: Optional[int] = None,
    *,
    interval: Optional[int] = None,
    segment_size: Optional[int] = None,
) -> tuple[VisitGrid, list[WalkSnapshot]]:
    """Run the pseudo-random walk over 1..limit, reproducible per (algorithm, seed)"""
    walker = Walker(prng, interval=interval)
    snapshots = walker.run(limit, cadence, segment_size=segment_size)
    return walker.grid, snapshots


def arrival_count_mode(walker: Walker) -> VisitGrid:
    """Grid counting one visit per arrival instead of one per integer.

    The origin holds the arrival of N = 1. Only available for walkers created with
    ``arrivals=True``.
    """
    if walker.arrivals is None:
        raise ConfigurationError("Walker was created without arrival counting")
    return walker.arrivals
