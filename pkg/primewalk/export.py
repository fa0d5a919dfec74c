"""CSV schemas, writers and validating readers.

All files are UTF-8 with LF line endings and a header row. Lines starting with '#'
carry fit results and labels and are skipped when reading.
"""

import csv
from pathlib import Path
from typing import IO, Any, Iterable, Iterator, Optional, Sequence, Union

from pydantic import ValidationError

from .exceptions import SchemaError
from .models import (
    BENFORD,
    AreaFit,
    BoxCountSeries,
    GapHistogram,
    IntervalRecord,
    LeadingDigitHistogram,
    PairMatrix,
    RatioSeries,
    WalkSnapshot,
    ZHistogram,
)

__all__ = [
    "SNAPSHOT_FIELDS",
    "INTERVAL_FIELDS",
    "BENFORD_FIELDS",
    "ZHIST_FIELDS",
    "BOXDIM_FIELDS",
    "RATIO_FIELDS",
    "GAP_FIELDS",
    "PAIR_FIELDS",
    "PI_FIELDS",
    "AREAFIT_FIELDS",
    "write_snapshots",
    "read_snapshots",
    "write_intervals",
    "read_intervals",
    "write_benford",
    "write_zhist",
    "write_boxdim",
    "write_ratios",
    "write_gaps",
    "write_pairs",
    "write_pi",
    "write_areafit",
]

SNAPSHOT_FIELDS = (
    "n",
    "x",
    "y",
    "area",
    "z_max",
    "bbox_min_x",
    "bbox_max_x",
    "bbox_min_y",
    "bbox_max_y",
    "interior_unvisited",
    "pi_n",
)
INTERVAL_FIELDS = ("start", "end", "z_max", "area", "d_f")
BENFORD_FIELDS = ("digit", "count", "proportion", "benford_expected", "abs_deviation")
ZHIST_FIELDS = ("z", "count")
BOXDIM_FIELDS = ("epsilon", "occupied")
RATIO_FIELDS = (
    "n",
    "pi_n",
    "n_over_ln_n",
    "area_pw",
    "area_prw_mean",
    "pi_over_area_pw",
    "pi_over_area_prw",
    "prw_over_pw",
    "z_max_pw",
    "z_max_prw_mean",
)
GAP_FIELDS = ("gap", "count")
PAIR_FIELDS = ("d1", "d2", "count", "expected_uniform", "deviation")
PI_FIELDS = ("limit", "pi_n", "n_over_ln_n")
AREAFIT_FIELDS = ("slope", "stderr", "points")


def _write_rows(
    f: IO[str],
    fields: Sequence[str],
    rows: Iterable[Sequence[Any]],
    comments: Iterable[str] = (),
) -> None:
    for comment in comments:
        f.write(f"# {comment}\n")
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(fields)
    writer.writerows(("" if v is None else v for v in row) for row in rows)


def _read_rows(path: Union[str, Path], fields: Sequence[str]) -> Iterator[dict]:
    """Yield rows of a CSV file as dicts after checking the header against fields"""
    with open(path, encoding="utf-8", newline="") as f:
        lines = (line for line in f if not line.startswith("#"))
        reader = csv.DictReader(lines)
        header = tuple(reader.fieldnames or ())
        if header != tuple(fields):
            for i, expected in enumerate(fields):
                got = header[i] if i < len(header) else None
                if got != expected:
                    raise SchemaError(
                        f"{Path(path).name}: column {i} should be '{expected}', got "
                        f"'{got}'",
                        field=expected,
                    )
            raise SchemaError(
                f"{Path(path).name}: unexpected extra column '{header[len(fields)]}'",
                field=header[len(fields)],
            )
        yield from reader


def _parse(path: Union[str, Path], model: Any, row: dict, line: int) -> Any:
    # DictReader files surplus values under the None key
    extra = row.pop(None, None)
    if extra:
        raise SchemaError(
            f"{Path(path).name} line {line}: {len(extra)} values beyond the last "
            f"column '{list(row)[-1]}'",
            field=list(row)[-1],
        )
    try:
        return model(**{k: (v if v != "" else None) for k, v in row.items()})
    except ValidationError as e:
        field = str(e.errors()[0]["loc"][0]) if e.errors() else None
        raise SchemaError(
            f"{Path(path).name} line {line}: invalid value for '{field}'", field=field
        ) from e


def write_snapshots(f: IO[str], snapshots: Iterable[WalkSnapshot]) -> None:
    _write_rows(
        f,
        SNAPSHOT_FIELDS,
        ([getattr(s, name) for name in SNAPSHOT_FIELDS] for s in snapshots),
    )


def read_snapshots(path: Union[str, Path]) -> list[WalkSnapshot]:
    return [
        _parse(path, WalkSnapshot, row, i + 2)
        for i, row in enumerate(_read_rows(path, SNAPSHOT_FIELDS))
    ]


def write_intervals(f: IO[str], records: Iterable[IntervalRecord]) -> None:
    _write_rows(
        f,
        INTERVAL_FIELDS,
        ([getattr(r, name) for name in INTERVAL_FIELDS] for r in records),
    )


def read_intervals(path: Union[str, Path]) -> list[IntervalRecord]:
    return [
        _parse(path, IntervalRecord, row, i + 2)
        for i, row in enumerate(_read_rows(path, INTERVAL_FIELDS))
    ]


def write_benford(f: IO[str], histogram: LeadingDigitHistogram) -> None:
    rows = zip(
        range(1, 10),
        histogram.counts,
        histogram.proportions,
        BENFORD,
        histogram.deviations(),
    )
    _write_rows(
        f,
        BENFORD_FIELDS,
        rows,
        comments=[
            f"population={histogram.population}, count_mode={histogram.count_mode}, "
            f"max_abs_deviation={histogram.max_abs_deviation!r}"
        ],
    )


def write_zhist(
    f: IO[str], histogram: ZHistogram, fit_error: Optional[str] = None
) -> None:
    if histogram.fit_range is not None:
        z_lo, z_hi = histogram.fit_range
        fit = f"fit: b={histogram.fit_b!r}, a={histogram.fit_a!r}, range={z_lo}..{z_hi}"
    else:
        fit = f"fit: unavailable ({fit_error or 'not computed'})"
    _write_rows(
        f,
        ZHIST_FIELDS,
        sorted(histogram.counts.items()),
        comments=[fit, f"count_mode={histogram.count_mode}"],
    )


def write_boxdim(
    f: IO[str], series: BoxCountSeries, fit_error: Optional[str] = None
) -> None:
    if series.d_f is not None:
        fit = f"d_f={series.d_f!r}, residual={series.residual!r}"
    else:
        fit = f"d_f=unavailable ({fit_error or 'not computed'})"
    _write_rows(f, BOXDIM_FIELDS, series.entries, comments=[fit])


def write_ratios(f: IO[str], series: RatioSeries) -> None:
    _write_rows(
        f,
        RATIO_FIELDS,
        ([getattr(p, name) for name in RATIO_FIELDS] for p in series.points),
    )


def write_gaps(f: IO[str], histogram: GapHistogram) -> None:
    _write_rows(
        f,
        GAP_FIELDS,
        sorted(histogram.counts.items()),
        comments=[f"mode={histogram.mode}, max_gap={histogram.max_gap}"],
    )


def write_pairs(f: IO[str], matrix: PairMatrix) -> None:
    _write_rows(f, PAIR_FIELDS, matrix.cells(), comments=[f"total={matrix.total}"])


def write_pi(f: IO[str], rows: Iterable[tuple[int, int, float]]) -> None:
    _write_rows(f, PI_FIELDS, rows)


def write_areafit(
    f: IO[str], fit: AreaFit, n_range: Optional[tuple[int, int]] = None
) -> None:
    comments = [f"n_range={n_range[0]}..{n_range[1]}"] if n_range else []
    _write_rows(
        f, AREAFIT_FIELDS, [(fit.slope, fit.stderr, fit.points)], comments=comments
    )
