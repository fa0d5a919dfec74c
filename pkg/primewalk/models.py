"""Domain models shared by the sieve, the walker, the statistics and the CLI"""

from __future__ import annotations

import math
from enum import Enum, IntEnum
from pathlib import Path
from typing import Any, Iterator, Literal, NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import settings

__all__ = [
    "TAIL_DIGITS",
    "BENFORD",
    "Move",
    "LastDigit",
    "GridCoord",
    "SieveConfig",
    "GapHistogram",
    "PairMatrix",
    "SegmentSummary",
    "PrngSpec",
    "WalkSnapshot",
    "IntervalRecord",
    "LeadingDigitHistogram",
    "ZHistogram",
    "BoxCountSeries",
    "RatioPoint",
    "RatioSeries",
    "AreaFit",
    "RunConfig",
    "RunManifest",
]

# Last digits of every prime except 2 and 5, in PairMatrix row/column order
TAIL_DIGITS = (1, 3, 7, 9)

BENFORD = tuple(math.log10(1 + 1 / d) for d in range(1, 10))


class Move(str, Enum):
    """A single step of the walker on the lattice"""

    up = "up"
    down = "down"
    left = "left"
    right = "right"
    stay = "stay"

    @property
    def delta(self) -> tuple[int, int]:
        return _MOVE_DELTAS[self]


_MOVE_DELTAS = {
    Move.up: (0, 1),
    Move.down: (0, -1),
    Move.left: (-1, 0),
    Move.right: (1, 0),
    Move.stay: (0, 0),
}


class LastDigit(IntEnum):
    """Decimal last digit of a prime. 2 and 5 are the only exceptional values."""

    ONE = 1
    TWO = 2
    THREE = 3
    FIVE = 5
    SEVEN = 7
    NINE = 9

    @property
    def exceptional(self) -> bool:
        return self in (LastDigit.TWO, LastDigit.FIVE)


class GridCoord(NamedTuple):
    x: int
    y: int


class SieveConfig(BaseModel):
    """Parameters of the segmented sieve.

    Attributes:
        limit: Inclusive upper bound on candidates. Values below 2 yield no primes.
        segment_size: Candidates per sieve window.
    """

    model_config = ConfigDict(frozen=True)

    limit: int
    segment_size: int = Field(
        default_factory=lambda: settings.primewalk_segment_size
    )

    @field_validator("segment_size")
    @classmethod
    def _at_least_two(cls, value: int) -> int:
        if value < 2:
            raise ValueError(f"segment_size must be at least 2, got {value}")
        return value


class GapHistogram(BaseModel):
    """Counts of differences between consecutive primes"""

    counts: dict[int, int] = Field(default_factory=dict)
    max_gap: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def mode(self) -> Optional[int]:
        """The jumping champion. Ties go to the smaller gap."""
        if not self.counts:
            return None
        return min(self.counts, key=lambda gap: (-self.counts[gap], gap))


def _zero_pairs() -> list[list[int]]:
    return [[0] * 4 for _ in range(4)]


class PairMatrix(BaseModel):
    """Counts of last-digit pairs (p_i, p_i+1) over digits 1, 3, 7, 9"""

    counts: list[list[int]] = Field(default_factory=_zero_pairs)
    total: int = 0

    @model_validator(mode="after")
    def _total_matches_cells(self) -> "PairMatrix":
        if len(self.counts) != 4 or any(len(row) != 4 for row in self.counts):
            raise ValueError("counts must be a 4x4 matrix")
        cells = sum(sum(row) for row in self.counts)
        if cells != self.total:
            raise ValueError(f"total {self.total} != sum of cells {cells}")
        return self

    def count(self, first: int, second: int) -> int:
        return self.counts[TAIL_DIGITS.index(first)][TAIL_DIGITS.index(second)]

    @property
    def expected_uniform(self) -> float:
        return self.total / 16

    def deviation(self) -> list[list[float]]:
        expected = self.expected_uniform
        return [[c - expected for c in row] for row in self.counts]

    def cells(self) -> Iterator[tuple[int, int, int, float, float]]:
        """Yield (d1, d2, count, expected_uniform, deviation) in row-major order"""
        expected = self.expected_uniform
        for i, d1 in enumerate(TAIL_DIGITS):
            for j, d2 in enumerate(TAIL_DIGITS):
                c = self.counts[i][j]
                yield d1, d2, c, expected, c - expected


class SegmentSummary(BaseModel):
    """Mergeable statistics of the primes in [lo, hi).

    Summaries of adjacent ranges merge associatively: the gap and the digit pair that
    straddle the boundary are recovered from ``last``/``first`` and
    ``last_tail``/``first_tail``.
    """

    lo: int
    hi: int
    count: int = 0
    first: Optional[int] = None
    last: Optional[int] = None
    # First and last primes whose last digit is 1, 3, 7 or 9
    first_tail: Optional[int] = None
    last_tail: Optional[int] = None
    gap_counts: dict[int, int] = Field(default_factory=dict)
    pair_counts: list[list[int]] = Field(default_factory=_zero_pairs)


class PrngSpec(BaseModel):
    """Generator used by the pseudo-random walk. Only MT19937 is supported."""

    model_config = ConfigDict(frozen=True)

    algorithm: Literal["mt19937"] = "mt19937"
    seed: int = Field(ge=0, lt=2**64)


class WalkSnapshot(BaseModel):
    """State of a walk after integer n has been assigned. Field order is the
    snapshots.csv column order."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=0)
    x: int
    y: int
    area: int = Field(ge=0)
    z_max: int = Field(ge=0)
    bbox_min_x: int
    bbox_max_x: int
    bbox_min_y: int
    bbox_max_y: int
    interior_unvisited: int = Field(ge=0)
    pi_n: int = Field(ge=0)

    @model_validator(mode="after")
    def _interior_matches_bbox(self) -> "WalkSnapshot":
        if self.area:
            cells = (self.bbox_max_x - self.bbox_min_x + 1) * (
                self.bbox_max_y - self.bbox_min_y + 1
            )
            if cells - self.area != self.interior_unvisited:
                raise ValueError(
                    f"interior_unvisited {self.interior_unvisited} does not match "
                    f"bbox cells {cells} minus area {self.area}"
                )
        return self

    @property
    def position(self) -> GridCoord:
        return GridCoord(self.x, self.y)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        return (self.bbox_min_x, self.bbox_max_x, self.bbox_min_y, self.bbox_max_y)


class IntervalRecord(BaseModel):
    """Statistics of the integers in (start, end] counted on their own"""

    model_config = ConfigDict(frozen=True)

    start: int
    end: int
    z_max: int
    area: int
    d_f: Optional[float] = None


class LeadingDigitHistogram(BaseModel):
    """Leading decimal digit counts with Benford expectations"""

    counts: list[int] = Field(min_length=9, max_length=9)
    population: str = "all"
    count_mode: str = "dwell"

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def proportions(self) -> list[float]:
        total = self.total
        return [c / total for c in self.counts]

    @property
    def benford(self) -> list[float]:
        return list(BENFORD)

    def deviations(self) -> list[float]:
        return [abs(p - b) for p, b in zip(self.proportions, BENFORD)]

    @property
    def max_abs_deviation(self) -> float:
        return max(self.deviations())


class ZHistogram(BaseModel):
    """Number of cells C(z) per visit count z, with the fit ln C(z) = b - a z"""

    counts: dict[int, int]
    fit_a: Optional[float] = None
    fit_b: Optional[float] = None
    fit_range: Optional[tuple[int, int]] = None
    count_mode: str = "dwell"

    @property
    def area(self) -> int:
        return sum(self.counts.values())

    @property
    def weighted_total(self) -> int:
        return sum(z * c for z, c in self.counts.items())


class BoxCountSeries(BaseModel):
    """Occupied box counts per box side and the fitted box-counting dimension"""

    entries: list[tuple[int, int]]
    d_f: Optional[float] = None
    residual: Optional[float] = None

    @property
    def epsilons(self) -> list[int]:
        return [e for e, _ in self.entries]

    @property
    def occupied(self) -> list[int]:
        return [o for _, o in self.entries]


class RatioPoint(BaseModel):
    """One row of ratios.csv"""

    n: int
    pi_n: int
    n_over_ln_n: float
    area_pw: int
    area_prw_mean: float
    pi_over_area_pw: float
    pi_over_area_prw: float
    prw_over_pw: float
    z_max_pw: int
    z_max_prw_mean: float


class RatioSeries(BaseModel):
    points: list[RatioPoint] = Field(default_factory=list)


class AreaFit(BaseModel):
    """Through-origin fit area = slope * n"""

    slope: float
    stderr: float
    points: int


class RunConfig(BaseModel):
    """Effective configuration of one `primewalk run` invocation"""

    mode: Literal["pw", "prw"] = "pw"
    limit: int = Field(ge=1)
    cadence: int = Field(default_factory=lambda: settings.primewalk_cadence, ge=1)
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)
    checkpoint_path: Optional[Path] = None
    output_dir: Path = Field(default_factory=lambda: settings.primewalk_out)
    count_mode: Literal["dwell", "arrival", "both"] = "dwell"
    interval: Optional[int] = Field(default=None, ge=1)
    segment_size: Optional[int] = Field(default=None, ge=2)
    # PW digit to move table; None is the default 1 up, 3 down, 7 left, 9 right
    moves: Optional[dict[int, Move]] = None

    @model_validator(mode="after")
    def _mode_options(self) -> "RunConfig":
        if self.mode == "prw" and self.seed is None:
            raise ValueError("seed is required when mode is 'prw'")
        if self.mode == "pw" and self.seed is not None:
            raise ValueError("seed is only valid when mode is 'prw'")
        if self.mode == "prw" and self.moves is not None:
            raise ValueError("a digit to move table only applies to mode 'pw'")
        if self.moves is not None and sorted(self.moves) != list(TAIL_DIGITS):
            raise ValueError(f"moves must map exactly the digits {TAIL_DIGITS}")
        return self

    @property
    def prng(self) -> Optional[PrngSpec]:
        return PrngSpec(seed=self.seed) if self.seed is not None else None


class RunManifest(BaseModel):
    version: str
    config: RunConfig
    settings: dict[str, Any]
    wall_time_s: float
    resumed_from: Optional[int] = None
    summary: WalkSnapshot
    intervals_closed: int = 0
