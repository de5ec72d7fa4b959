"""Substitution grids: alphabets, replacement rules, expansion and
contraction between levels, and cell resolution on levels far too large
to materialize.

Conventions used throughout the package:

* coordinates are 1-indexed with the origin at the top-left, row-major;
* a 1-dimensional grid is a height-1 grid, so every operation below is
  written once for both dimensionalities (a 1D rule is a 1 x b block);
* level k is the grid after k-1 replacement steps from the start grid,
  so the parent cell of (i, j) is (ceil(i/rh), ceil(j/b)).

Row and column values on deep levels exceed any fixed machine width
(level 167 of the shipped puzzle has ~2**166 columns); they are plain
Python integers everywhere, never floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    AddressRangeError,
    AmbiguousRulesError,
    ContractionError,
    UnknownLetterError,
)

# Symbols with structural meaning in the text formats; they can never be
# alphabet letters.
RESERVED_CHARS = frozenset("*/#= \t\r\n")


def _check_symbol(ch: str) -> None:
    if len(ch) != 1 or not ch.isprintable() or ch in RESERVED_CHARS:
        raise UnknownLetterError(f"invalid alphabet symbol {ch!r}")


@dataclass(frozen=True)
class Alphabet:
    """Ordered collection of distinct single-character symbols."""

    letters: tuple[str, ...]

    def __post_init__(self):
        if not self.letters:
            raise UnknownLetterError("alphabet must contain at least one letter")
        for ch in self.letters:
            _check_symbol(ch)
        if len(set(self.letters)) != len(self.letters):
            raise UnknownLetterError("alphabet letters must be distinct")

    @classmethod
    def from_string(cls, letters: str) -> "Alphabet":
        return cls(tuple(letters))

    @property
    def n(self) -> int:
        return len(self.letters)

    def __contains__(self, ch: str) -> bool:
        return ch in self.letters

    def __iter__(self):
        return iter(self.letters)


@dataclass(frozen=True)
class RuleSet:
    """Total map from letters to replacement blocks.

    ``rules[letter]`` is a tuple of block rows: one row of length ``b``
    when ``dimension`` is 1, and ``b`` rows of length ``b`` when it is 2.
    """

    alphabet: Alphabet
    dimension: int
    b: int
    rules: dict[str, tuple[str, ...]] = field(compare=False)

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if self.b < 2:
            raise ValueError(f"block side must be >= 2, got {self.b}")
        want_rows = self.rule_rows
        missing = [ch for ch in self.alphabet if ch not in self.rules]
        if missing:
            raise UnknownLetterError(f"letters without a rule: {missing}")
        extra = [ch for ch in self.rules if ch not in self.alphabet]
        if extra:
            raise UnknownLetterError(f"rules for letters outside the alphabet: {extra}")
        for ch, block in self.rules.items():
            if len(block) != want_rows or any(len(row) != self.b for row in block):
                raise ValueError(
                    f"rule for {ch!r} must be {want_rows} row(s) of {self.b} letters"
                )
            for row in block:
                for out in row:
                    if out not in self.alphabet:
                        raise UnknownLetterError(
                            f"rule for {ch!r} uses unknown letter {out!r}"
                        )

    @property
    def rule_rows(self) -> int:
        """Height of one replacement block (1 for 1D rules, b for 2D)."""
        return 1 if self.dimension == 1 else self.b

    @property
    def n(self) -> int:
        return self.alphabet.n

    def block(self, letter: str) -> tuple[str, ...]:
        try:
            return self.rules[letter]
        except KeyError:
            raise UnknownLetterError(f"no rule for letter {letter!r}") from None

    def duplicate_blocks(self) -> tuple[tuple[str, ...], ...]:
        """Groups of letters sharing an identical replacement block."""
        by_block: dict[tuple[str, ...], list[str]] = {}
        for ch in self.alphabet:
            by_block.setdefault(self.rules[ch], []).append(ch)
        return tuple(
            tuple(group) for group in by_block.values() if len(group) > 1
        )

    def text(self) -> str:
        """Canonical one-line rendering, usable as a deterministic sort key."""
        return ";".join(f"{ch}>{'/'.join(self.rules[ch])}" for ch in self.alphabet)


@dataclass(frozen=True)
class Grid:
    """Concrete rectangular array of letters tagged with its level."""

    rows: int
    cols: int
    cells: str
    level: int = 1

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must be at least 1 x 1")
        if len(self.cells) != self.rows * self.cols:
            raise ValueError(
                f"cell count {len(self.cells)} != {self.rows} x {self.cols}"
            )
        if self.level < 1:
            raise ValueError("level tag must be >= 1")

    @classmethod
    def from_rows(cls, rows: list[str] | tuple[str, ...], level: int = 1) -> "Grid":
        if not rows:
            raise ValueError("grid needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("grid rows must all have the same length")
        return cls(len(rows), width, "".join(rows), level)

    @classmethod
    def from_text(cls, text: str, level: int = 1) -> "Grid":
        """Parse a ``ROW/ROW/...`` grid literal."""
        return cls.from_rows(text.strip().split("/"), level)

    def letter(self, row: int, col: int) -> str:
        """Letter at 1-indexed (row, col)."""
        if not (1 <= row <= self.rows and 1 <= col <= self.cols):
            raise AddressRangeError(
                f"({row}, {col}) outside {self.rows} x {self.cols} grid"
            )
        return self.cells[(row - 1) * self.cols + (col - 1)]

    def lines(self) -> tuple[str, ...]:
        return tuple(
            self.cells[i * self.cols:(i + 1) * self.cols] for i in range(self.rows)
        )

    def text(self) -> str:
        return "/".join(self.lines())


@dataclass(frozen=True)
class CellAddress:
    """One cell of one level; row/col may be astronomically large."""

    level: int
    row: int
    col: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if self.row < 1 or self.col < 1:
            raise AddressRangeError(f"address ({self.row}, {self.col}) not positive")


def _check_grid_letters(grid: Grid, rules: RuleSet) -> None:
    bad = set(grid.cells) - set(rules.alphabet.letters)
    if bad:
        raise UnknownLetterError(f"grid uses letters outside the alphabet: {sorted(bad)}")


# ---------------------------------------------------------------------------
# expansion / contraction
# ---------------------------------------------------------------------------

def expand(grid: Grid, rules: RuleSet, steps: int = 1) -> Grid:
    """Apply the replacement map ``steps`` times.

    Each cell becomes its rule block; every step multiplies the height by
    the block height and the width by b, and bumps the level tag.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    _check_grid_letters(grid, rules)
    rh, b = rules.rule_rows, rules.b
    lines = list(grid.lines())
    for _ in range(steps):
        nxt: list[str] = []
        for line in lines:
            blocks = [rules.rules[ch] for ch in line]
            for br in range(rh):
                nxt.append("".join(block[br] for block in blocks))
        lines = nxt
    return Grid(grid.rows * rh ** steps, grid.cols * b ** steps,
                "".join(lines), grid.level + steps)


def contract(grid: Grid, rules: RuleSet) -> Grid:
    """Invert one expansion step.

    Fails if two rules share a block (no unique inverse), or if some
    block of the grid is not the image of any letter; the error reports
    the first offending block position in reading order.
    """
    collisions = rules.duplicate_blocks()
    if collisions:
        raise AmbiguousRulesError(
            "identical replacement blocks make contraction ambiguous: "
            + ", ".join("=".join(group) for group in collisions),
            collisions,
        )
    rh, b = rules.rule_rows, rules.b
    if grid.rows % rh or grid.cols % b:
        raise ContractionError(
            f"grid {grid.rows} x {grid.cols} not divisible into {rh} x {b} blocks"
        )
    if grid.level < 2:
        raise ContractionError("cannot contract below level 1")
    _check_grid_letters(grid, rules)
    owner = {rules.rules[ch]: ch for ch in rules.alphabet}
    lines = grid.lines()
    out_rows: list[str] = []
    for bi in range(grid.rows // rh):
        row_chars: list[str] = []
        for bj in range(grid.cols // b):
            block = tuple(
                lines[bi * rh + r][bj * b:(bj + 1) * b] for r in range(rh)
            )
            ch = owner.get(block)
            if ch is None:
                raise ContractionError(
                    f"block {'/'.join(block)} at block position ({bi + 1}, {bj + 1}) "
                    "matches no rule",
                    bi + 1,
                    bj + 1,
                )
            row_chars.append(ch)
        out_rows.append("".join(row_chars))
    return Grid(grid.rows // rh, grid.cols // b, "".join(out_rows), grid.level - 1)


# ---------------------------------------------------------------------------
# implicit deep-level addressing
# ---------------------------------------------------------------------------

def level_shape(l1: Grid, rules: RuleSet, level: int) -> tuple[int, int]:
    """(rows, cols) of the given level; exact big-integer arithmetic."""
    if level < 1:
        raise ValueError("level must be >= 1")
    return (l1.rows * rules.rule_rows ** (level - 1),
            l1.cols * rules.b ** (level - 1))


def address_to_path(
    addr: CellAddress, rules: RuleSet
) -> tuple[tuple[int, int], tuple[tuple[int, int], ...]]:
    """Split an address into its level-1 ancestor cell and the per-level
    sub-cell digits (most significant first, each in [0, block side))."""
    rh, b = rules.rule_rows, rules.b
    r, c = addr.row - 1, addr.col - 1
    rdigits: list[int] = []
    cdigits: list[int] = []
    for _ in range(addr.level - 1):
        r, dr = divmod(r, rh)
        c, dc = divmod(c, b)
        rdigits.append(dr)
        cdigits.append(dc)
    path = tuple(zip(reversed(rdigits), reversed(cdigits)))
    return (r + 1, c + 1), path


def path_to_address(
    l1_cell: tuple[int, int], path: tuple[tuple[int, int], ...], rules: RuleSet
) -> CellAddress:
    """Inverse of :func:`address_to_path`; round-trips exactly."""
    rh, b = rules.rule_rows, rules.b
    r, c = l1_cell[0] - 1, l1_cell[1] - 1
    for dr, dc in path:
        if not (0 <= dr < rh and 0 <= dc < b):
            raise AddressRangeError(f"digit ({dr}, {dc}) outside block shape")
        r = r * rh + dr
        c = c * b + dc
    return CellAddress(len(path) + 1, r + 1, c + 1)


def letter_at(l1: Grid, rules: RuleSet, addr: CellAddress) -> str:
    """Letter at ``addr`` on level ``addr.level``.

    Runs in O(level) time and O(1) memory: finds the level-1 ancestor
    cell, then descends the digit path through the rule blocks.  No grid
    beyond level 1 is ever built.
    """
    if l1.level != 1:
        raise ValueError("start grid must be tagged level 1")
    _check_grid_letters(l1, rules)
    max_rows, max_cols = level_shape(l1, rules, addr.level)
    if not (addr.row <= max_rows and addr.col <= max_cols):
        raise AddressRangeError(
            f"({addr.row}, {addr.col}) outside level-{addr.level} grid "
            f"of {max_rows} x {max_cols}"
        )
    (r1, c1), path = address_to_path(addr, rules)
    ch = l1.letter(r1, c1)
    for dr, dc in path:
        ch = rules.rules[ch][dr][dc]
    return ch


def descendant_block_range(
    l1_cell: tuple[int, int], level: int, rules: RuleSet
) -> tuple[tuple[int, int], tuple[int, int]]:
    """Inclusive (row, col) ranges covered on ``level`` by the descendants
    of a level-1 cell: rows (r-1)*rh**(level-1)+1 .. r*rh**(level-1), and
    the column analogue with b."""
    r, c = l1_cell
    if r < 1 or c < 1:
        raise AddressRangeError(f"cell ({r}, {c}) not positive")
    if level < 1:
        raise ValueError("level must be >= 1")
    rspan = rules.rule_rows ** (level - 1)
    cspan = rules.b ** (level - 1)
    return ((r - 1) * rspan + 1, r * rspan), ((c - 1) * cspan + 1, c * cspan)


def all_rule_sets(alphabet: Alphabet, b: int, dimension: int = 1):
    """Yield every rule assignment for the alphabet, in a deterministic
    lexicographic order.  There are n**(b*n) of them in one dimension;
    use only at small n."""
    rh = 1 if dimension == 1 else b
    rows = ["".join(p) for p in itertools.product(alphabet.letters, repeat=b)]
    blocks = [tuple(block) for block in itertools.product(rows, repeat=rh)]
    for combo in itertools.product(blocks, repeat=alphabet.n):
        yield RuleSet(alphabet, dimension, b,
                      dict(zip(alphabet.letters, combo)))
