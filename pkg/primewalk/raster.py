"""Render visit grids as 8-bit PGM images.

Pixel (row, column) shows cell (min_x + column, max_y - row), so the image has y
pointing up like the lattice. Width and height equal the grid's bounding box.
"""

import logging
from pathlib import Path
from typing import IO, Literal, Union

import numpy as np

from .exceptions import ConfigurationError, EmptyInputError, SchemaError
from .grid import VisitGrid
from .utils import _atomic_open

logger = logging.getLogger(__name__)

__all__ = ["SCALINGS", "grid_to_array", "write_pgm", "read_pgm"]

Scaling = Literal["binary", "linear", "log", "order"]
SCALINGS: tuple[Scaling, ...] = ("binary", "linear", "log", "order")
MAXVAL = 255


def grid_to_array(grid: VisitGrid, scaling: Scaling = "binary") -> np.ndarray:
    """(height, width) uint8 image of grid

    Params:
        scaling: "binary" maps visited cells to 255. "linear" maps z to
            floor(255 z / z_max) and "log" to floor(255 ln(1 + z) / ln(1 + z_max)).
            "order" shades cells by when they were first visited, from 1 for the
            start cell to 255 for the newest one. Unvisited cells are 0 in every
            scaling.
    """
    if not len(grid):
        raise EmptyInputError("Cannot rasterize an empty grid")
    if scaling not in SCALINGS:
        raise ConfigurationError(f"Unknown scaling '{scaling}', use one of {SCALINGS}")

    min_x, _, _, max_y = grid.bbox
    coords = grid.coords()
    z = grid.values()
    if scaling == "binary":
        pixels = np.full(len(z), MAXVAL, dtype=np.int64)
    elif scaling == "linear":
        pixels = MAXVAL * z // grid.z_max
    elif scaling == "order":
        # Cells are stored in first-visit order
        rank = np.arange(len(z), dtype=np.int64)
        pixels = 1 + (MAXVAL - 1) * rank // max(len(z) - 1, 1)
    else:
        pixels = np.floor(MAXVAL * np.log1p(z) / np.log1p(grid.z_max)).astype(np.int64)

    image = np.zeros((grid.height, grid.width), dtype=np.uint8)
    image[max_y - coords[:, 1], coords[:, 0] - min_x] = np.clip(pixels, 0, MAXVAL)
    return image


def _header(magic: str, image: np.ndarray, comment: str) -> str:
    height, width = image.shape
    lines = [magic, "# row 0 is max_y, column 0 is min_x"]
    if comment:
        lines.append(f"# {comment}")
    lines += [f"{width} {height}", str(MAXVAL)]
    return "\n".join(lines) + "\n"


def write_pgm(
    path: Union[str, Path, IO[bytes]],
    image: np.ndarray,
    plain: bool = False,
    comment: str = "",
) -> None:
    """Write image as a binary (P5) or plain (P2) PGM

    Params:
        path: File path, written atomically, or a binary stream.
        image: 2-d uint8 array.
        plain: Write ASCII P2 instead of binary P5.
        comment: Extra header comment line.
    """
    if plain:
        body = (
            "\n".join(" ".join(str(v) for v in row) for row in image.tolist()) + "\n"
        ).encode("ascii")
        data = _header("P2", image, comment).encode("ascii") + body
    else:
        data = _header("P5", image, comment).encode("ascii") + image.tobytes()

    if isinstance(path, (str, Path)):
        with _atomic_open(path, "wb") as f:
            f.write(data)
        logger.info("Wrote %dx%d PGM to %s", image.shape[1], image.shape[0], path)
    else:
        path.write(data)


def read_pgm(path: Union[str, Path]) -> np.ndarray:
    """Read a P2 or P5 PGM with maxval 255 into a (height, width) uint8 array"""
    data = Path(path).read_bytes()
    tokens: list[bytes] = []
    offset = 0
    # Magic, width, height, maxval; comments run from '#' to end of line
    while len(tokens) < 4:
        while offset < len(data) and data[offset : offset + 1].isspace():
            offset += 1
        if offset >= len(data):
            raise SchemaError(f"{path}: PGM header is truncated", field="header")
        if data[offset : offset + 1] == b"#":
            offset = data.find(b"\n", offset)
            offset = len(data) if offset < 0 else offset
            continue
        end = offset
        while end < len(data) and not data[end : end + 1].isspace():
            end += 1
        tokens.append(data[offset:end])
        offset = end

    magic, width, height, maxval = tokens[0], *(int(t) for t in tokens[1:])
    if maxval != MAXVAL:
        raise SchemaError(f"{path}: maxval {maxval} is not {MAXVAL}", field="maxval")
    if magic == b"P5":
        pixels = np.frombuffer(data, dtype=np.uint8, offset=offset + 1)
    elif magic == b"P2":
        pixels = np.array(data[offset:].split(), dtype=np.int64).astype(np.uint8)
    else:
        raise SchemaError(f"{path}: unsupported magic {magic!r}", field="magic")
    if pixels.size != width * height:
        raise SchemaError(
            f"{path}: expected {width * height} pixels, got {pixels.size}",
            field="pixels",
        )
    return pixels.reshape(height, width)
