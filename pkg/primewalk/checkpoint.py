"""Binary checkpoints of a Walker.

Resuming from a checkpoint continues the walk exactly: running to L directly or to
L/2, saving, loading and running on to L gives identical grids, snapshots and, for
the pRW, identical generator state.

Layout (little-endian), format version 1:

    magic        4s        b"PWCK"
    version      u16
    flags        u16       bit 0 pRW, bit 1 arrival grid, bit 2 interval accumulator
    n            u64       last integer assigned
    x, y         i64 i64   walker position
    bbox         4 x i64   min_x, max_x, min_y, max_y of the dwell grid
    primes_seen  u64
    moves        4 x u8    move codes (Move declaration order) for digits 1, 3, 7, 9
    [pRW]        u64 seed, 625 x u32 MT19937 state (624 words + position),
                 u8 has_gauss, f64 gauss_next
    dwell cells  u64 count, then count x (i64 x, i64 y, u64 z)
    [arrivals]   u64 count, then cells
    [interval]   u64 length, u64 start, u64 count, then cells
    crc32        u32 over every preceding byte

Any change to the layout bumps VERSION.
"""

import logging
import struct
import zlib
from pathlib import Path
from typing import Union

import numpy as np

from .exceptions import CheckpointError
from .grid import CELL_DTYPE, VisitGrid
from .models import TAIL_DIGITS, Move, PrngSpec
from .utils import _atomic_open
from .walk import Walker

logger = logging.getLogger(__name__)

__all__ = [
    "MAGIC",
    "VERSION",
    "checkpoint_save",
    "checkpoint_load",
    "save_checkpoint",
    "load_checkpoint",
]

MAGIC = b"PWCK"
VERSION = 1

FLAG_PRW = 1
FLAG_ARRIVALS = 2
FLAG_INTERVAL = 4

_PREAMBLE = struct.Struct("<4sH")
_HEADER = struct.Struct("<4sHHQqqqqqqQ4B")
_PRNG = struct.Struct("<Q625IBd")
_COUNT = struct.Struct("<Q")
_INTERVAL = struct.Struct("<QQ")
_CRC = struct.Struct("<I")
_MOVE_CODES = list(Move)
# random.Random.getstate() version tag for MT19937
_MT_STATE_VERSION = 3


def checkpoint_save(walker: Walker) -> bytes:
    """Serialize walker. Must be called between runs, never during one."""
    flags = 0
    if walker.rng is not None:
        flags |= FLAG_PRW
    if walker.arrivals is not None:
        flags |= FLAG_ARRIVALS
    if walker.interval_grid is not None:
        flags |= FLAG_INTERVAL

    parts = [
        _HEADER.pack(
            MAGIC,
            VERSION,
            flags,
            walker.n,
            walker.x,
            walker.y,
            *walker.grid.bbox,
            walker.primes_seen,
            *(_MOVE_CODES.index(walker.moves[digit]) for digit in TAIL_DIGITS),
        )
    ]
    if walker.rng is not None:
        assert walker.prng is not None
        _, internal, gauss = walker.rng.getstate()
        parts.append(
            _PRNG.pack(
                walker.prng.seed, *internal, gauss is not None, gauss or 0.0
            )
        )
    parts.append(_pack_cells(walker.grid))
    if walker.arrivals is not None:
        parts.append(_pack_cells(walker.arrivals))
    if walker.interval_grid is not None:
        parts.append(_INTERVAL.pack(walker.interval, walker.interval_start))
        parts.append(_pack_cells(walker.interval_grid))

    body = b"".join(parts)
    return body + _CRC.pack(zlib.crc32(body))


def checkpoint_load(data: bytes) -> Walker:
    """Rebuild a Walker from checkpoint_save output.

    Raises:
        CheckpointError: Bytes are not a checkpoint, come from another format version,
            are truncated or fail the checksum.
    """
    if len(data) < _PREAMBLE.size:
        raise CheckpointError(f"Checkpoint is truncated ({len(data)} bytes)")
    magic, version = _PREAMBLE.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError(f"Not a checkpoint: magic bytes {magic!r}")
    if version != VERSION:
        raise CheckpointError(
            f"Checkpoint format version {version} is not supported (expected "
            f"{VERSION})"
        )
    if len(data) < _HEADER.size + _CRC.size:
        raise CheckpointError(f"Checkpoint is truncated ({len(data)} bytes)")
    body = data[: -_CRC.size]
    (crc,) = _CRC.unpack_from(data, len(body))
    if zlib.crc32(body) != crc:
        raise CheckpointError("Checkpoint checksum mismatch (truncated or corrupted)")

    reader = _Reader(body)
    (_, _, flags, n, x, y, *fields) = reader.unpack(_HEADER)
    bbox = tuple(fields[:4])
    primes_seen = fields[4]
    codes = fields[5:]
    try:
        moves = {digit: _MOVE_CODES[code] for digit, code in zip(TAIL_DIGITS, codes)}
    except IndexError:
        raise CheckpointError(f"Invalid move codes {codes}") from None

    prng = None
    state = None
    if flags & FLAG_PRW:
        seed, *words = reader.unpack(_PRNG)
        internal, has_gauss, gauss = words[:625], words[625], words[626]
        prng = PrngSpec(seed=seed)
        state = (_MT_STATE_VERSION, tuple(internal), gauss if has_gauss else None)

    grid = reader.cells()
    arrivals = reader.cells() if flags & FLAG_ARRIVALS else None
    interval = None
    interval_start = 0
    interval_grid = None
    if flags & FLAG_INTERVAL:
        interval, interval_start = reader.unpack(_INTERVAL)
        interval_grid = reader.cells()
    if reader.offset != len(body):
        raise CheckpointError(f"{len(body) - reader.offset} unexpected trailing bytes")

    if grid.total() != n:
        raise CheckpointError(f"Dwell counts sum to {grid.total()} but n is {n}")
    if grid.area and grid.bbox != bbox:
        raise CheckpointError(f"Stored bbox {bbox} does not match cells {grid.bbox}")

    walker = Walker(
        prng,
        arrivals=arrivals is not None,
        interval=interval,
        moves=None if prng is not None else moves,
    )
    walker.n = n
    walker.x = x
    walker.y = y
    walker.primes_seen = primes_seen
    walker.grid = grid
    if arrivals is not None:
        walker.arrivals = arrivals
    if interval_grid is not None:
        walker.interval_start = interval_start
        walker.interval_grid = interval_grid
    if state is not None:
        assert walker.rng is not None
        try:
            walker.rng.setstate(state)
        except (TypeError, ValueError) as e:
            raise CheckpointError(f"Invalid MT19937 state: {e}") from e
    return walker


def save_checkpoint(walker: Walker, path: Union[str, Path]) -> Path:
    """Atomically write walker to path"""
    path = Path(path)
    with _atomic_open(path, "wb") as f:
        f.write(checkpoint_save(walker))
    logger.info("Wrote checkpoint at n=%d to %s", walker.n, path)
    return path


def load_checkpoint(path: Union[str, Path]) -> Walker:
    return checkpoint_load(Path(path).read_bytes())


def _pack_cells(grid: VisitGrid) -> bytes:
    return _COUNT.pack(len(grid)) + grid.to_records().tobytes()


class _Reader:
    """Sequential reads from a checkpoint body"""

    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def _need(self, size: int) -> None:
        if self.offset + size > len(self.data):
            raise CheckpointError(
                f"Checkpoint is truncated: need {size} bytes at offset {self.offset}"
            )

    def unpack(self, fmt: struct.Struct) -> tuple:
        self._need(fmt.size)
        values = fmt.unpack_from(self.data, self.offset)
        self.offset += fmt.size
        return values

    def cells(self) -> VisitGrid:
        (count,) = self.unpack(_COUNT)
        size = count * CELL_DTYPE.itemsize
        self._need(size)
        records = np.frombuffer(
            self.data, dtype=CELL_DTYPE, count=count, offset=self.offset
        )
        self.offset += size
        return VisitGrid.from_records(records)
