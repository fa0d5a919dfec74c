"""Sparse visit counter over the integer lattice"""

from typing import Iterable, Iterator, Mapping, Optional

import numpy as np

from .models import GridCoord

__all__ = ["VisitGrid", "CELL_DTYPE"]

# On-disk and in-memory record layout of a cell
CELL_DTYPE = np.dtype([("x", "<i8"), ("y", "<i8"), ("z", "<u8")])


class VisitGrid:
    """Map from lattice cell to visit count z, with running area, z_max and bbox.

    Cells are kept in first-visit order. Only cells with z >= 1 are stored so area is
    always the number of keys.
    """

    __slots__ = ("cells", "z_max", "_min_x", "_max_x", "_min_y", "_max_y")

    def __init__(self, cells: Optional[Mapping[tuple[int, int], int]] = None):
        self.cells: dict[tuple[int, int], int] = {}
        self.z_max = 0
        self._min_x = self._max_x = self._min_y = self._max_y = 0
        for cell, z in (cells or {}).items():
            self.add(cell, z)

    def add(self, cell: tuple[int, int], count: int) -> int:
        """Add count visits to cell and return its new z"""
        z = self.cells.get(cell)
        if z is None:
            x, y = cell
            if self.cells:
                if x < self._min_x:
                    self._min_x = x
                elif x > self._max_x:
                    self._max_x = x
                if y < self._min_y:
                    self._min_y = y
                elif y > self._max_y:
                    self._max_y = y
            else:
                self._min_x = self._max_x = x
                self._min_y = self._max_y = y
            z = count
        else:
            z += count
        self.cells[cell] = z
        if z > self.z_max:
            self.z_max = z
        return z

    @property
    def area(self) -> int:
        return len(self.cells)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        """(min_x, max_x, min_y, max_y). All zero for an empty grid."""
        return (self._min_x, self._max_x, self._min_y, self._max_y)

    @property
    def width(self) -> int:
        return self._max_x - self._min_x + 1 if self.cells else 0

    @property
    def height(self) -> int:
        return self._max_y - self._min_y + 1 if self.cells else 0

    @property
    def interior_unvisited(self) -> int:
        """Cells inside the bounding box that were never visited"""
        return self.width * self.height - self.area

    def total(self) -> int:
        return sum(self.cells.values())

    def coords(self) -> np.ndarray:
        """(area, 2) int64 array of visited cells"""
        if not self.cells:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(list(self.cells), dtype=np.int64)

    def values(self) -> np.ndarray:
        return np.fromiter(self.cells.values(), dtype=np.int64, count=len(self.cells))

    def axis_values(self, y: int = 0) -> np.ndarray:
        """z of the visited cells on the horizontal line through y"""
        return np.array(
            [z for (_, cy), z in self.cells.items() if cy == y], dtype=np.int64
        )

    def to_records(self) -> np.ndarray:
        records = np.empty(len(self.cells), dtype=CELL_DTYPE)
        coords = self.coords()
        records["x"] = coords[:, 0]
        records["y"] = coords[:, 1]
        records["z"] = self.values()
        return records

    @classmethod
    def from_records(cls, records: np.ndarray) -> "VisitGrid":
        grid = cls()
        for x, y, z in zip(
            records["x"].tolist(), records["y"].tolist(), records["z"].tolist()
        ):
            grid.add((x, y), z)
        return grid

    @classmethod
    def from_items(cls, items: Iterable[tuple[tuple[int, int], int]]) -> "VisitGrid":
        grid = cls()
        for cell, z in items:
            grid.add(cell, z)
        return grid

    def __getitem__(self, cell: tuple[int, int]) -> int:
        return self.cells.get(cell, 0)

    def __contains__(self, cell: object) -> bool:
        return cell in self.cells

    def __iter__(self) -> Iterator[GridCoord]:
        return (GridCoord(*cell) for cell in self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VisitGrid):
            return NotImplemented
        return self.cells == other.cells

    def __repr__(self) -> str:
        return (
            f"VisitGrid(area={self.area}, z_max={self.z_max}, bbox={self.bbox})"
        )
