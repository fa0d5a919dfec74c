import struct

import pytest

from primewalk.checkpoint import (
    MAGIC,
    checkpoint_load,
    checkpoint_save,
    load_checkpoint,
    save_checkpoint,
)
from primewalk.exceptions import CheckpointError
from primewalk.models import Move, PrngSpec
from primewalk.walk import Walker


def split_run(make_walker, limit, cadence):
    """Run to limit // 2, round trip through bytes and run on to limit"""
    walker = make_walker()
    first = walker.run(limit // 2, cadence)
    resumed = checkpoint_load(checkpoint_save(walker))
    second = resumed.run(limit, cadence)
    kept = [s for s in first if s.n % cadence == 0]
    return resumed, kept + second, walker.intervals + resumed.intervals


@pytest.mark.parametrize(
    "make_walker",
    (
        lambda: Walker(),
        lambda: Walker(PrngSpec(seed=42)),
        lambda: Walker(arrivals=True),
        lambda: Walker(PrngSpec(seed=2**64 - 1), arrivals=True, interval=7000),
        lambda: Walker(
            moves={1: Move.left, 3: Move.right, 7: Move.down, 9: Move.up},
            interval=10**4,
        ),
    ),
)
def test_resume_matches_direct_run(make_walker):
    limit, cadence = 2 * 10**5 + 37, 10**4
    direct = make_walker()
    direct_snapshots = direct.run(limit, cadence)

    resumed, snapshots, intervals = split_run(make_walker, limit, cadence)

    assert resumed.grid == direct.grid
    assert resumed.position == direct.position
    assert resumed.primes_seen == direct.primes_seen
    assert snapshots == direct_snapshots
    assert intervals == direct.intervals
    assert resumed.arrivals == direct.arrivals
    assert resumed.moves == direct.moves
    if direct.rng is not None:
        assert resumed.rng.getstate() == direct.rng.getstate()
    assert checkpoint_save(resumed) == checkpoint_save(direct)


def test_resume_from_unaligned_checkpoint():
    walker = Walker(PrngSpec(seed=3))
    walker.run(12345, cadence=1000)
    resumed = checkpoint_load(checkpoint_save(walker))
    direct = Walker(PrngSpec(seed=3))
    assert resumed.run(30000, 1000) == [
        s for s in direct.run(30000, 1000) if s.n > 12345
    ]


def test_fresh_state_round_trip():
    for walker in (Walker(), Walker(PrngSpec(seed=9), arrivals=True, interval=5)):
        data = checkpoint_save(walker)
        assert data.startswith(MAGIC)
        assert checkpoint_save(checkpoint_load(data)) == data


def test_prng_state_round_trip():
    walker = Walker(PrngSpec(seed=123))
    walker.run(1000)
    loaded = checkpoint_load(checkpoint_save(walker))
    assert loaded.prng == walker.prng
    assert [loaded.rng.getrandbits(2) for _ in range(100)] == [
        walker.rng.getrandbits(2) for _ in range(100)
    ]


def test_checkpoint_files(tmp_path):
    walker = Walker(arrivals=True)
    walker.run(5000)
    path = save_checkpoint(walker, tmp_path / "nested" / "grid.ckpt")
    assert path.exists()
    assert list(path.parent.iterdir()) == [path]
    assert load_checkpoint(path).grid == walker.grid


@pytest.fixture
def checkpoint_bytes():
    walker = Walker(PrngSpec(seed=1), arrivals=True)
    walker.run(1000)
    return checkpoint_save(walker)


def test_bad_magic(checkpoint_bytes):
    with pytest.raises(CheckpointError, match="magic"):
        checkpoint_load(b"NOPE" + checkpoint_bytes[4:])


def test_version_mismatch(checkpoint_bytes):
    data = checkpoint_bytes[:4] + struct.pack("<H", 2) + checkpoint_bytes[6:]
    with pytest.raises(CheckpointError, match="version 2"):
        checkpoint_load(data)


@pytest.mark.parametrize("keep", (0, 3, 5, 40, -1, -4))
def test_truncated(checkpoint_bytes, keep):
    with pytest.raises(CheckpointError):
        checkpoint_load(checkpoint_bytes[:keep])


def test_corrupted_byte(checkpoint_bytes):
    data = bytearray(checkpoint_bytes)
    data[len(data) // 2] ^= 0xFF
    with pytest.raises(CheckpointError, match="checksum"):
        checkpoint_load(bytes(data))


def test_trailing_bytes(checkpoint_bytes):
    with pytest.raises(CheckpointError):
        checkpoint_load(checkpoint_bytes + b"\x00")
