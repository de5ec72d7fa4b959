"""Rectangular letter-or-wildcard patterns and their matching in grids.

A pattern is the bounding box of a set of letters: a rows x cols array
whose entries are either concrete letters or the wildcard ``*``.  All
patterns handed between modules are trimmed, i.e. the first and last row
and column each contain at least one concrete cell.  Words become
patterns by orientation in one of the eight compass directions.
"""

from __future__ import annotations

import enum
from typing import Iterator, NamedTuple

from .core import Grid

WILDCARD = "*"


class Direction(enum.Enum):
    """Reading directions; the value is the (row, col) step per letter."""

    E = (0, 1)
    W = (0, -1)
    S = (1, 0)
    N = (-1, 0)
    SE = (1, 1)
    NE = (-1, 1)
    SW = (1, -1)
    NW = (-1, -1)


# Tie-break order used when several directions yield the same level.
DIRECTION_ORDER = (
    Direction.E, Direction.S, Direction.SE, Direction.W,
    Direction.N, Direction.NW, Direction.NE, Direction.SW,
)

DIAGONALS = frozenset({Direction.SE, Direction.NE, Direction.SW, Direction.NW})
ANTIDIAGONALS = frozenset({Direction.NE, Direction.SW})


class Pattern(NamedTuple):
    """Trimmed bounding box of letters; ``cells`` is row-major with ``*``
    for unconstrained entries.  NamedTuple rather than dataclass for cheap
    construction and hashing: the backward search creates these by the
    million."""

    rows: int
    cols: int
    cells: str

    def at(self, r: int, c: int) -> str:
        """Entry at 0-indexed (r, c)."""
        return self.cells[r * self.cols + c]

    @property
    def concrete_count(self) -> int:
        return self.rows * self.cols - self.cells.count(WILDCARD)

    def concrete_cells(self) -> Iterator[tuple[int, int, str]]:
        """Yield (row, col, letter) of every non-wildcard cell, 0-indexed,
        row-major."""
        cols = self.cols
        for i, ch in enumerate(self.cells):
            if ch != WILDCARD:
                yield i // cols, i % cols, ch

    def lines(self) -> tuple[str, ...]:
        return tuple(
            self.cells[i * self.cols:(i + 1) * self.cols] for i in range(self.rows)
        )

    def text(self) -> str:
        """Wire form: rows joined by ``/``, wildcard ``*``."""
        return "/".join(self.lines())


def pattern_from_rows(rows: list[str] | tuple[str, ...]) -> Pattern:
    if not rows:
        raise ValueError("pattern needs at least one row")
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows):
        raise ValueError("pattern rows must be non-empty and equal-length")
    return Pattern(len(rows), width, "".join(rows))


def parse_pattern(text: str) -> Pattern:
    """Parse the ``C**/*A*/**T`` wire form."""
    return pattern_from_rows(text.strip().split("/"))


def word_to_pattern(word: str, direction: Direction) -> Pattern:
    """Lay a word out along a compass direction and box it.

    Horizontal/vertical words give 1 x n / n x 1 patterns; diagonal words
    give n x n patterns with letters on one diagonal and wildcards
    elsewhere.
    """
    if not word:
        raise ValueError("word must be non-empty")
    if WILDCARD in word:
        raise ValueError("words cannot contain the wildcard symbol")
    n = len(word)
    dr, dc = direction.value
    # Start corner such that the walk stays inside the bounding box.
    r = n - 1 if dr < 0 else 0
    c = n - 1 if dc < 0 else 0
    rows = n if dr else 1
    cols = n if dc else 1
    grid = [[WILDCARD] * cols for _ in range(rows)]
    for ch in word:
        grid[r][c] = ch
        r += dr
        c += dc
    return pattern_from_rows(["".join(row) for row in grid])


def trim(pattern: Pattern) -> Pattern:
    """Strip all-wildcard border rows and columns; idempotent.

    This realizes the bounding box of the pattern's concrete cells, which
    is also the minimality criterion used for parents of patterns.
    """
    concrete = [(r, c) for r, c, _ in pattern.concrete_cells()]
    if not concrete:
        raise ValueError("cannot trim a pattern with no concrete cells")
    r0 = min(r for r, _ in concrete)
    r1 = max(r for r, _ in concrete)
    c0 = min(c for _, c in concrete)
    c1 = max(c for _, c in concrete)
    if (r0, c0) == (0, 0) and (r1, c1) == (pattern.rows - 1, pattern.cols - 1):
        return pattern
    lines = pattern.lines()
    return pattern_from_rows([line[c0:c1 + 1] for line in lines[r0:r1 + 1]])


def is_trimmed(pattern: Pattern) -> bool:
    lines = pattern.lines()
    if set(lines[0]) == {WILDCARD} or set(lines[-1]) == {WILDCARD}:
        return False
    first_col = pattern.cells[::pattern.cols]
    last_col = pattern.cells[pattern.cols - 1::pattern.cols]
    return set(first_col) != {WILDCARD} and set(last_col) != {WILDCARD}


def occurrences(pattern: Pattern, grid: Grid) -> list[tuple[int, int]]:
    """All 1-indexed top-left positions where the pattern's box fits in
    the grid and every concrete cell matches, in row-major order."""
    boxed = trim(pattern)
    cells = list(boxed.concrete_cells())
    lines = grid.lines()
    out: list[tuple[int, int]] = []
    for r0 in range(grid.rows - boxed.rows + 1):
        for c0 in range(grid.cols - boxed.cols + 1):
            if all(lines[r0 + r][c0 + c] == ch for r, c, ch in cells):
                out.append((r0 + 1, c0 + 1))
    return out


def bounding_subgrid(grid: Grid, cells: list[tuple[int, int]]) -> Grid:
    """Smallest rectangle of the grid containing the given 1-indexed
    cells, returned with the grid's letters filled in."""
    if not cells:
        raise ValueError("need at least one cell")
    r0 = min(r for r, _ in cells)
    r1 = max(r for r, _ in cells)
    c0 = min(c for _, c in cells)
    c1 = max(c for _, c in cells)
    lines = grid.lines()
    return Grid.from_rows(
        [lines[r - 1][c0 - 1:c1] for r in range(r0, r1 + 1)], grid.level
    )


def two_diagonal_support(pattern: Pattern, anti: bool = False) -> bool:
    """True iff every concrete cell lies on one of two fixed adjacent
    diagonals: i-j in {d, d+1} for some d (or i+j for anti-diagonals)."""
    keys = sorted(
        {r + c if anti else r - c for r, c, _ in pattern.concrete_cells()}
    )
    return keys[-1] - keys[0] <= 1
