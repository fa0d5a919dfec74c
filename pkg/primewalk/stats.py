"""Statistics over visit grids and snapshot series.

Every function here is pure: grids and snapshots are only read.
"""

import logging
from math import sqrt
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .exceptions import AlignmentError, ConfigurationError, EmptyInputError, FitError
from .grid import VisitGrid
from .models import (
    AreaFit,
    BoxCountSeries,
    LeadingDigitHistogram,
    RatioPoint,
    RatioSeries,
    WalkSnapshot,
    ZHistogram,
)
from .primes import n_over_ln_n

logger = logging.getLogger(__name__)

__all__ = [
    "leading_digits",
    "benford_histogram",
    "grid_benford",
    "z_histogram",
    "default_epsilons",
    "box_count",
    "ratio_series",
    "area_slope_fit",
]

# Slack on the 0 <= d_f <= 2 check for floating point noise of the fit
_DF_TOLERANCE = 1e-9


def leading_digits(values: np.ndarray) -> np.ndarray:
    """Leading decimal digit of each value >= 1"""
    digits = np.array(values, dtype=np.int64)
    if (digits < 1).any():
        raise ConfigurationError("Leading digits need values >= 1")
    while True:
        big = digits >= 10
        if not big.any():
            return digits
        digits[big] //= 10


def benford_histogram(
    values: Union[np.ndarray, Iterable[int]],
    population: str = "all",
    count_mode: str = "dwell",
) -> LeadingDigitHistogram:
    """Tally leading digits 1..9 of values for comparison with log10(1 + 1/d)

    Params:
        values: Positive integers.
        population: Label of the cells the values came from, e.g. "all" or "axis".
        count_mode: Label of the z semantics the values were counted with.
    """
    if not isinstance(values, np.ndarray):
        values = np.fromiter(values, dtype=np.int64)
    if values.size == 0:
        raise EmptyInputError("Benford analysis needs at least one value")
    counts = np.bincount(leading_digits(values), minlength=10)[1:10]
    return LeadingDigitHistogram(
        counts=counts.tolist(), population=population, count_mode=count_mode
    )


def grid_benford(
    grid: VisitGrid, population: str = "all", count_mode: str = "dwell"
) -> LeadingDigitHistogram:
    """Benford histogram of all cell z values, or only of the cells with y = 0"""
    if population == "all":
        values = grid.values()
    elif population == "axis":
        values = grid.axis_values(0)
    else:
        raise ConfigurationError(f"Unknown population '{population}'")
    return benford_histogram(values, population=population, count_mode=count_mode)


def z_histogram(
    grid: VisitGrid,
    fit_range: Optional[tuple[int, int]] = None,
    count_mode: str = "dwell",
) -> ZHistogram:
    """Number of cells C(z) per visit count and the least-squares fit
    ln C(z) = b - a z over fit_range.

    Params:
        grid: Grid to analyze.
        fit_range: Inclusive (z_lo, z_hi). Defaults to the 10th percentile of cell
            z values up to the largest z.
        count_mode: Label of the z semantics of grid.

    Raises:
        FitError: Fewer than 2 distinct z values in fit_range. ``.result`` holds the
            counts.
    """
    if not len(grid):
        raise EmptyInputError("Cannot build a z histogram of an empty grid")
    values = grid.values()
    zs, counts = np.unique(values, return_counts=True)
    if fit_range is None:
        fit_range = (int(np.percentile(values, 10, method="lower")), int(zs[-1]))
    z_lo, z_hi = fit_range
    if z_lo > z_hi or z_hi < zs[0] or z_lo > zs[-1]:
        raise ConfigurationError(
            f"fit_range {fit_range} is outside the observed z values "
            f"[{zs[0]}, {zs[-1]}]"
        )

    histogram = ZHistogram(
        counts=dict(zip(zs.tolist(), counts.tolist())), count_mode=count_mode
    )
    selected = (zs >= z_lo) & (zs <= z_hi)
    if selected.sum() < 2:
        raise FitError(
            f"Need at least 2 distinct z values in {fit_range} to fit",
            result=histogram,
        )
    slope, intercept = np.polyfit(
        zs[selected].astype(float), np.log(counts[selected]), 1
    )
    return histogram.model_copy(
        update={
            "fit_a": float(-slope),
            "fit_b": float(intercept),
            "fit_range": (int(z_lo), int(z_hi)),
        }
    )


def default_epsilons(width: int, height: int) -> list[int]:
    """Powers of 2 from 1 up to min(width, height) // 4, at least [1]"""
    top = min(width, height) // 4
    epsilons = [1]
    while epsilons[-1] * 2 <= top:
        epsilons.append(epsilons[-1] * 2)
    return epsilons


def box_count(
    grid: VisitGrid, epsilons: Optional[Sequence[int]] = None
) -> BoxCountSeries:
    """Box-counting dimension of the visited cells.

    For each box side epsilon the bounding box is cut into an epsilon mesh anchored at
    (min_x, min_y) and the boxes holding at least one visited cell are counted. d_f
    is the least-squares slope of ln(occupied) against ln(1/epsilon).

    Raises:
        FitError: Fewer than 2 epsilons, or d_f outside [0, 2]. ``.result`` holds
            the occupied counts.
    """
    if not len(grid):
        raise EmptyInputError("Cannot box count an empty grid")
    if epsilons is None:
        epsilons = default_epsilons(grid.width, grid.height)
    if any(e < 1 for e in epsilons):
        raise ConfigurationError(f"Box sides must be positive, got {list(epsilons)}")
    if len(set(epsilons)) != len(epsilons):
        raise ConfigurationError(f"Box sides must be distinct, got {list(epsilons)}")

    min_x, _, min_y, _ = grid.bbox
    coords = grid.coords()
    dx = coords[:, 0] - min_x
    dy = coords[:, 1] - min_y
    entries = []
    for epsilon in sorted(int(e) for e in epsilons):
        rows = (grid.height - 1) // epsilon + 1
        boxes = (dx // epsilon) * rows + dy // epsilon
        entries.append((epsilon, int(np.unique(boxes).size)))

    series = BoxCountSeries(entries=entries)
    if len(entries) < 2:
        raise FitError("Need at least 2 box sides to fit a dimension", result=series)
    log_inverse = -np.log(np.array(series.epsilons, dtype=float))
    log_occupied = np.log(np.array(series.occupied, dtype=float))
    slope, intercept = np.polyfit(log_inverse, log_occupied, 1)
    residual = sqrt(
        float(np.mean((log_occupied - (slope * log_inverse + intercept)) ** 2))
    )
    if not -_DF_TOLERANCE <= slope <= 2 + _DF_TOLERANCE:
        raise FitError(f"Fitted d_f={slope} is outside [0, 2]", result=series)
    d_f = min(max(float(slope), 0.0), 2.0)
    logger.debug("Box counting %s -> d_f=%.4f", entries, d_f)
    return series.model_copy(update={"d_f": d_f, "residual": residual})


def ratio_series(
    pw_snapshots: Sequence[WalkSnapshot],
    prw_snapshot_sets: Sequence[Sequence[WalkSnapshot]],
) -> RatioSeries:
    """Area and z_max ratios of the PW against the mean of one or more pRWs.

    pi(n) comes from the snapshots, which count every prime the walk consumed, so it
    is exact. n / ln n is reported next to it.
    """
    if not prw_snapshot_sets:
        raise ConfigurationError("At least one pRW snapshot series is required")
    for i in range(1, len(pw_snapshots)):
        if pw_snapshots[i].n <= pw_snapshots[i - 1].n:
            raise AlignmentError(
                f"PW snapshot n values must increase; row {i} has n="
                f"{pw_snapshots[i].n} after n={pw_snapshots[i - 1].n}"
            )
    for j, prw in enumerate(prw_snapshot_sets):
        for i, (a, b) in enumerate(zip(pw_snapshots, prw)):
            if a.n != b.n:
                raise AlignmentError(
                    f"Row {i}: PW has n={a.n} but pRW series {j} has n={b.n}"
                )
        if len(prw) != len(pw_snapshots):
            raise AlignmentError(
                f"Row {min(len(prw), len(pw_snapshots))}: PW has "
                f"{len(pw_snapshots)} rows but pRW series {j} has {len(prw)}"
            )

    k = len(prw_snapshot_sets)
    points = []
    for i, snapshot in enumerate(pw_snapshots):
        area_prw = sum(prw[i].area for prw in prw_snapshot_sets) / k
        z_max_prw = sum(prw[i].z_max for prw in prw_snapshot_sets) / k
        points.append(
            RatioPoint(
                n=snapshot.n,
                pi_n=snapshot.pi_n,
                n_over_ln_n=n_over_ln_n(snapshot.n),
                area_pw=snapshot.area,
                area_prw_mean=area_prw,
                pi_over_area_pw=snapshot.pi_n / snapshot.area,
                pi_over_area_prw=snapshot.pi_n / area_prw,
                prw_over_pw=area_prw / snapshot.area,
                z_max_pw=snapshot.z_max,
                z_max_prw_mean=z_max_prw,
            )
        )
    return RatioSeries(points=points)


def area_slope_fit(
    snapshots: Sequence[WalkSnapshot], n_range: Optional[tuple[int, int]] = None
) -> AreaFit:
    """Least-squares fit of area = slope * n through the origin.

    Params:
        snapshots: Walk snapshots.
        n_range: Inclusive (n_lo, n_hi) restricting the points used.
    """
    selected = [
        s for s in snapshots if n_range is None or n_range[0] <= s.n <= n_range[1]
    ]
    if len(selected) < 2:
        raise FitError(f"Need at least 2 snapshots to fit, got {len(selected)}")
    n = np.array([s.n for s in selected], dtype=float)
    area = np.array([s.area for s in selected], dtype=float)
    sxx = float(n @ n)
    slope = float(n @ area) / sxx
    residuals = area - slope * n
    stderr = sqrt(float(residuals @ residuals) / (len(selected) - 1) / sxx)
    return AreaFit(slope=slope, stderr=stderr, points=len(selected))
