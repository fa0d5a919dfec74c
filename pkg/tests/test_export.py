import io

import pytest

from primewalk.exceptions import SchemaError
from primewalk.export import (
    INTERVAL_FIELDS,
    RATIO_FIELDS,
    SNAPSHOT_FIELDS,
    read_intervals,
    read_snapshots,
    write_benford,
    write_boxdim,
    write_gaps,
    write_intervals,
    write_pairs,
    write_snapshots,
    write_zhist,
)
from primewalk.models import (
    BoxCountSeries,
    IntervalRecord,
    RatioPoint,
    WalkSnapshot,
    ZHistogram,
)
from primewalk.primes import gap_histogram, pair_matrix
from primewalk.stats import benford_histogram
from primewalk.walk import run_pw


def test_field_tuples_follow_the_models():
    assert SNAPSHOT_FIELDS == tuple(WalkSnapshot.model_fields)
    assert INTERVAL_FIELDS == tuple(IntervalRecord.model_fields)
    assert RATIO_FIELDS == tuple(RatioPoint.model_fields)


def test_snapshots_file(tmp_path):
    _, snapshots = run_pw(13, cadence=1)
    path = tmp_path / "snapshots.csv"
    with open(path, "w", newline="") as f:
        write_snapshots(f, snapshots)

    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == ",".join(SNAPSHOT_FIELDS)
    assert lines[-1] == "13,-1,-1,4,5,-1,0,-1,0,0,6"
    assert read_snapshots(path) == snapshots


def test_intervals_file(tmp_path):
    records = [
        IntervalRecord(start=0, end=10, z_max=4, area=3, d_f=None),
        IntervalRecord(start=10, end=20, z_max=6, area=2, d_f=1.2345),
    ]
    path = tmp_path / "intervals.csv"
    with open(path, "w", newline="") as f:
        write_intervals(f, records)
    assert path.read_text().splitlines()[1] == "0,10,4,3,"
    assert read_intervals(path) == records


def test_read_snapshots_names_the_mismatched_column(tmp_path):
    path = tmp_path / "snapshots.csv"
    header = list(SNAPSHOT_FIELDS)
    header[4] = "zmax"
    path.write_text(",".join(header) + "\n")
    with pytest.raises(SchemaError) as exc_info:
        read_snapshots(path)
    assert exc_info.value.field == "z_max"


def test_read_snapshots_names_the_invalid_field(tmp_path):
    path = tmp_path / "snapshots.csv"
    path.write_text(",".join(SNAPSHOT_FIELDS) + "\n1,0,0,one,1,0,0,0,0,0,0\n")
    with pytest.raises(SchemaError) as exc_info:
        read_snapshots(path)
    assert exc_info.value.field == "area"


def test_read_snapshots_extra_column(tmp_path):
    path = tmp_path / "snapshots.csv"
    path.write_text(",".join((*SNAPSHOT_FIELDS, "extra")) + "\n")
    with pytest.raises(SchemaError) as exc_info:
        read_snapshots(path)
    assert exc_info.value.field == "extra"


def test_read_snapshots_extra_value_in_row(tmp_path):
    path = tmp_path / "snapshots.csv"
    path.write_text(",".join(SNAPSHOT_FIELDS) + "\n1,0,0,1,1,0,0,0,0,0,0,99\n")
    with pytest.raises(SchemaError) as exc_info:
        read_snapshots(path)
    assert exc_info.value.field == "pi_n"
    assert "line 2" in str(exc_info.value)


def test_read_snapshots_skips_comments(tmp_path):
    path = tmp_path / "snapshots.csv"
    path.write_text(
        "# written by hand\n" + ",".join(SNAPSHOT_FIELDS) + "\n1,0,0,1,1,0,0,0,0,0,0\n"
    )
    (snapshot,) = read_snapshots(path)
    assert snapshot.n == 1


def test_benford_csv():
    f = io.StringIO()
    write_benford(f, benford_histogram(range(1, 10)))
    lines = f.getvalue().splitlines()
    assert lines[0].startswith("# population=all, count_mode=dwell")
    assert lines[1] == "digit,count,proportion,benford_expected,abs_deviation"
    assert lines[2].startswith("1,1,0.1111")
    assert len(lines) == 11


def test_zhist_csv_with_and_without_fit():
    f = io.StringIO()
    write_zhist(
        f, ZHistogram(counts={2: 1, 1: 2}, fit_a=0.5, fit_b=1.5, fit_range=(1, 2))
    )
    assert f.getvalue().splitlines() == [
        "# fit: b=1.5, a=0.5, range=1..2",
        "# count_mode=dwell",
        "z,count",
        "1,2",
        "2,1",
    ]

    f = io.StringIO()
    write_zhist(f, ZHistogram(counts={7: 1}), fit_error="too few points")
    assert f.getvalue().splitlines()[0] == "# fit: unavailable (too few points)"


def test_boxdim_csv():
    f = io.StringIO()
    write_boxdim(f, BoxCountSeries(entries=[(1, 4), (2, 1)], d_f=2.0, residual=0.0))
    assert f.getvalue().splitlines() == [
        "# d_f=2.0, residual=0.0",
        "epsilon,occupied",
        "1,4",
        "2,1",
    ]


def test_gaps_csv():
    f = io.StringIO()
    write_gaps(f, gap_histogram(10))
    assert f.getvalue().splitlines()[1:] == ["gap,count", "1,1", "2,2"]


def test_pairs_csv():
    f = io.StringIO()
    write_pairs(f, pair_matrix(6))
    lines = f.getvalue().splitlines()
    assert lines[0] == "# total=3"
    assert lines[1] == "d1,d2,count,expected_uniform,deviation"
    assert len(lines) == 2 + 16
    assert "3,7,1,0.1875,0.8125" in lines
