"""End-to-end puzzle solving.

Pipeline: load the puzzle file, contract the printed grid down to level
one, find each listed word's earliest level and direction by backward
search, cross out the level-one ancestors of every placed letter to
reveal the hidden message, sum the levels, and read the answer out of
the marker letter's descendant block on that level.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .ancestry import (
    AncestrySearcher,
    LayeredSearch,
    SearchResult,
    witness_coordinates,
)
from .core import CellAddress, Grid, RuleSet, contract, descendant_block_range, letter_at, level_shape
from .errors import PuzzleFormatError, SolveError
from .files import parse_grid_section, parse_rules_section, scan_sections
from .patterns import (
    DIRECTION_ORDER,
    Direction,
    Pattern,
    occurrences,
    pattern_from_rows,
    word_to_pattern,
)

DEFAULT_MARKER = "X"


@dataclass(frozen=True)
class PuzzleSpec:
    """A parsed puzzle: rules, the given grid, its contraction to level
    one, the word list (raw and normalized), and the search settings."""

    rules: RuleSet
    given_grid: Grid
    l1: Grid
    raw_words: tuple[str, ...]
    words: tuple[str, ...]
    allowed_directions: tuple[Direction, ...]
    answer_length: int


@dataclass(frozen=True)
class Placement:
    """Where one word lives: its earliest level, direction, grounded
    ancestor on level one, and the exact letter addresses on its level."""

    raw: str
    word: str
    direction: Direction
    level: int
    ancestor: Pattern
    anchor: tuple[int, int]
    offsets: tuple[tuple[int, int], ...]
    addresses: tuple[CellAddress, ...]
    nodes_expanded: int
    patterns_seen: int


@dataclass(frozen=True)
class AnswerWindow:
    """Central window of the marker's descendant block on the answer
    level, with the marker-shaped reading when one is present."""

    level: int
    top: int
    left: int
    window: tuple[str, ...]
    found: bool
    x_top: int | None = None
    x_left: int | None = None
    x_rows: tuple[str, ...] = ()
    main_diagonal: str = ""
    anti_diagonal: str = ""
    answer: str = ""


@dataclass(frozen=True)
class SolveReport:
    placements: tuple[Placement, ...]
    level_counts: dict[int, int]
    crossed_cells: frozenset[tuple[int, int]]
    message: str
    level_sum: int
    answer: AnswerWindow | None      # None when no unique marker exists
    nodes_expanded: int
    patterns_seen: int


def normalize_word(raw: str) -> str:
    """Uppercase and drop everything that is not a letter
    (``LEVY DRAGON`` -> ``LEVYDRAGON``, ``T-SQUARE`` -> ``TSQUARE``)."""
    word = "".join(ch for ch in raw if ch.isalpha()).upper()
    if not word:
        raise ValueError(f"word entry {raw!r} has no letters")
    return word


def load_puzzle(path: str) -> PuzzleSpec:
    """Parse and validate a puzzle file; contracts the given grid down
    to level one eagerly so bad transcriptions fail at load time."""
    with open(path, encoding="utf-8") as fh:
        sections = scan_sections(fh.read())
    for required in ("alphabet", "grid", "words"):
        if required not in sections:
            raise PuzzleFormatError(f"{path}: missing [{required}] section")
    rules = parse_rules_section(sections["alphabet"])
    grid = parse_grid_section(sections["grid"])
    raw_words: list[str] = []
    words: list[str] = []
    for lineno, line in sections["words"]:
        try:
            word = normalize_word(line)
        except ValueError as exc:
            raise PuzzleFormatError(str(exc), lineno) from None
        bad = set(word) - set(rules.alphabet.letters)
        if bad:
            raise PuzzleFormatError(
                f"word {word!r} uses letters outside the alphabet: {sorted(bad)}",
                lineno)
        raw_words.append(line)
        words.append(word)
    if not words:
        raise PuzzleFormatError(f"{path}: empty [words] section")
    answer_length = 0
    for lineno, line in sections.get("answer", []):
        key, _, value = line.partition("=")
        if key.strip().lower() != "length":
            raise PuzzleFormatError(f"unexpected [answer] line {line!r}", lineno)
        try:
            answer_length = int(value.strip())
        except ValueError:
            raise PuzzleFormatError(f"bad answer length {value!r}", lineno) from None
    directions = list(DIRECTION_ORDER)
    if "directions" in sections:
        directions = []
        for lineno, line in sections["directions"]:
            for token in line.replace(",", " ").split():
                try:
                    d = Direction[token.upper()]
                except KeyError:
                    raise PuzzleFormatError(
                        f"unknown direction {token!r}", lineno) from None
                if d not in directions:
                    directions.append(d)
        if not directions:
            raise PuzzleFormatError(f"{path}: empty [directions] section")
    l1 = grid
    for _ in range(grid.level - 1):
        l1 = contract(l1, rules)
    return PuzzleSpec(
        rules=rules, given_grid=grid, l1=l1,
        raw_words=tuple(raw_words), words=tuple(words),
        allowed_directions=tuple(directions),
        answer_length=answer_length,
    )


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------

def _place_word(searcher: AncestrySearcher, spec: PuzzleSpec, raw: str,
                word: str) -> tuple[Placement, list[SearchResult]]:
    """Earliest placement of one word over the allowed directions.

    All direction searches advance in lockstep one depth layer at a
    time, so the first grounded layer is the global minimum level and
    the losing directions stop there instead of running to their
    fixpoints.  Ties at the same depth go to the direction order, then
    to the in-grid witness tie-break.
    """
    ordered = [d for d in DIRECTION_ORDER if d in spec.allowed_directions]
    runs: list[tuple[Direction, LayeredSearch]] = []
    targets: set[Pattern] = set()
    for d in ordered:
        target = word_to_pattern(word, d)
        if target in targets:
            continue    # a 1-letter word is the same pattern in all directions
        targets.add(target)
        runs.append((d, LayeredSearch(searcher, target)))
    live = list(runs)
    winner: tuple[Direction, LayeredSearch, tuple] | None = None
    while live and winner is None:
        for d, run in live:
            grounded = run.check_grounding()
            if grounded is not None:
                winner = (d, run, grounded)
                break
        if winner is None:
            live = [(d, run) for d, run in live if run.advance()]
    nodes = sum(run.nodes_expanded for _, run in runs)
    seen = sum(len(run.links) for _, run in runs)
    if winner is None:
        raise SolveError(
            f"word {word!r} cannot appear on any level for this start grid")
    d, run, grounded = winner
    result = run.result_found(word, d, grounded)
    addresses = witness_coordinates(result, spec.l1, spec.rules)
    placement = Placement(
        raw=raw, word=word, direction=d, level=result.level,
        ancestor=result.ancestor, anchor=result.anchor,
        offsets=result.offsets, addresses=tuple(addresses),
        nodes_expanded=nodes, patterns_seen=seen,
    )
    # For cross-all mode the caller also wants every other grounding at
    # the winning depth.
    extras: list[SearchResult] = []
    for dd, rr in live:
        for pat in rr.frontier:
            for pos in searcher.ground_positions(pat):
                extras.append(rr.result_found(word, dd, (pos, pat)))
    return placement, extras


def crossed_out_l1_cells(placements, rules: RuleSet) -> frozenset[tuple[int, int]]:
    """Level-one cells whose descendants carry the placed words: cell
    (ceil(i/rh**(k-1)), ceil(j/b**(k-1))) for a letter at (i, j) on
    level k.  Only the words' own letters count, never the wildcard
    padding of a diagonal's bounding box."""
    rh, b = rules.rule_rows, rules.b
    crossed: set[tuple[int, int]] = set()
    for placement in placements:
        for addr in placement.addresses:
            rspan = rh ** (addr.level - 1)
            cspan = b ** (addr.level - 1)
            crossed.add((-(-addr.row // rspan), -(-addr.col // cspan)))
    return frozenset(crossed)


def answer_window(spec: PuzzleSpec, target_level: int, window_radius: int = 4,
                  *, marker: str = DEFAULT_MARKER) -> AnswerWindow:
    """Read the answer region on ``target_level``.

    Locates the unique marker letter on level one, takes the central
    2*radius window of its descendant block (clamped to the level), and
    reads the marker-shaped arrangement at the block's exact center: the
    two diagonals of the central (answer_length/2)-sized box, main
    diagonal top-down then anti-diagonal bottom-up.  When the block is
    too small for that box the raw window is returned unread.
    """
    marks = occurrences(pattern_from_rows([marker]), spec.l1)
    if len(marks) != 1:
        raise SolveError(
            f"marker {marker!r} occurs {len(marks)} times on level one, need exactly 1")
    (rows_range, cols_range) = descendant_block_range(
        marks[0], target_level, spec.rules)
    max_rows, max_cols = level_shape(spec.l1, spec.rules, target_level)
    mid_r = rows_range[0] + (rows_range[1] - rows_range[0] + 1) // 2
    mid_c = cols_range[0] + (cols_range[1] - cols_range[0] + 1) // 2
    top = max(1, mid_r - window_radius)
    bottom = min(max_rows, mid_r + window_radius - 1)
    left = max(1, mid_c - window_radius)
    right = min(max_cols, mid_c + window_radius - 1)
    window = tuple(
        "".join(
            letter_at(spec.l1, spec.rules, CellAddress(target_level, r, c))
            for c in range(left, right + 1)
        )
        for r in range(top, bottom + 1)
    )
    x_size = spec.answer_length // 2
    x_top, x_left = mid_r - x_size // 2, mid_c - x_size // 2
    fits = (
        x_size >= 2 and spec.answer_length % 2 == 0
        and x_top >= rows_range[0] and x_top + x_size - 1 <= rows_range[1]
        and x_left >= cols_range[0] and x_left + x_size - 1 <= cols_range[1]
        and x_top >= top and x_top + x_size - 1 <= bottom
        and x_left >= left and x_left + x_size - 1 <= right
    )
    if not fits:
        return AnswerWindow(level=target_level, top=top, left=left,
                            window=window, found=False)
    rows = tuple(
        window[(x_top - top) + r][(x_left - left):(x_left - left) + x_size]
        for r in range(x_size)
    )
    main = "".join(rows[i][i] for i in range(x_size))
    anti = "".join(rows[x_size - 1 - i][i] for i in range(x_size))
    return AnswerWindow(
        level=target_level, top=top, left=left, window=window, found=True,
        x_top=x_top, x_left=x_left, x_rows=rows,
        main_diagonal=main, anti_diagonal=anti, answer=main + anti,
    )


def _solve_one(searcher: AncestrySearcher, spec: PuzzleSpec, raw: str,
               word: str, cross_all: bool) -> tuple[Placement, list[Placement]]:
    placement, extras = _place_word(searcher, spec, raw, word)
    cross = [placement]
    if cross_all:
        for res in extras:
            addresses = witness_coordinates(res, spec.l1, spec.rules)
            cross.append(Placement(
                raw=raw, word=word, direction=res.direction,
                level=res.level, ancestor=res.ancestor, anchor=res.anchor,
                offsets=res.offsets, addresses=tuple(addresses),
                nodes_expanded=0, patterns_seen=0,
            ))
    return placement, cross


def _solve_one_task(args) -> tuple[Placement, list[Placement]]:
    # Worker entry point: per-word searches share nothing, so each worker
    # builds its own searcher.
    spec, raw, word, cross_all = args
    return _solve_one(AncestrySearcher(spec.rules, spec.l1), spec, raw, word,
                      cross_all)


def solve(spec: PuzzleSpec, *, cross_all: bool = False,
          window_radius: int = 4, marker: str = DEFAULT_MARKER,
          jobs: int = 1) -> SolveReport:
    """Full solution: per-word placements, the crossed-out message, the
    level sum, and the answer window on the summed level.

    With ``cross_all`` every grounding found at a word's earliest level
    contributes to the crossed-out set, not just the deterministic
    witness.  ``jobs`` > 1 fans the per-word searches out to worker
    processes; the report is identical whatever the degree.
    """
    if jobs > 1:
        import multiprocessing

        tasks = [(spec, raw, word, cross_all)
                 for raw, word in zip(spec.raw_words, spec.words)]
        with multiprocessing.Pool(jobs) as pool:
            results = pool.map(_solve_one_task, tasks)
    else:
        searcher = AncestrySearcher(spec.rules, spec.l1)
        results = [_solve_one(searcher, spec, raw, word, cross_all)
                   for raw, word in zip(spec.raw_words, spec.words)]
    placements: list[Placement] = [placement for placement, _ in results]
    cross_sources: list[Placement] = [p for _, cross in results for p in cross]
    crossed = crossed_out_l1_cells(cross_sources, spec.rules)
    lines = spec.l1.lines()
    message = "".join(
        lines[r][c]
        for r in range(spec.l1.rows)
        for c in range(spec.l1.cols)
        if (r + 1, c + 1) not in crossed
    )
    level_sum = sum(p.level for p in placements)
    marks = occurrences(pattern_from_rows([marker]), spec.l1)
    window = (answer_window(spec, level_sum, window_radius, marker=marker)
              if len(marks) == 1 else None)
    return SolveReport(
        placements=tuple(placements),
        level_counts=dict(sorted(Counter(p.level for p in placements).items())),
        crossed_cells=crossed,
        message=message,
        level_sum=level_sum,
        answer=window,
        nodes_expanded=sum(p.nodes_expanded for p in placements),
        patterns_seen=sum(p.patterns_seen for p in placements),
    )


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------

def report_to_json_dict(report: SolveReport) -> dict:
    return {
        "placements": [
            {
                "raw": p.raw,
                "word": p.word,
                "direction": p.direction.name,
                "level": p.level,
                "ancestor": p.ancestor.text(),
                "anchor": list(p.anchor),
                "offsets": [list(off) for off in p.offsets],
                "addresses": [[a.level, a.row, a.col] for a in p.addresses],
                "nodes_expanded": p.nodes_expanded,
                "patterns_seen": p.patterns_seen,
            }
            for p in report.placements
        ],
        "level_counts": {str(k): v for k, v in report.level_counts.items()},
        "crossed_cells": sorted(list(c) for c in report.crossed_cells),
        "message": report.message,
        "level_sum": report.level_sum,
        "answer": None if report.answer is None else {
            "level": report.answer.level,
            "top": report.answer.top,
            "left": report.answer.left,
            "window": list(report.answer.window),
            "found": report.answer.found,
            "x_top": report.answer.x_top,
            "x_left": report.answer.x_left,
            "x_rows": list(report.answer.x_rows),
            "main_diagonal": report.answer.main_diagonal,
            "anti_diagonal": report.answer.anti_diagonal,
            "answer": report.answer.answer,
        },
        "nodes_expanded": report.nodes_expanded,
        "patterns_seen": report.patterns_seen,
    }


def report_from_json_dict(data: dict) -> SolveReport:
    from .patterns import parse_pattern

    placements = tuple(
        Placement(
            raw=p["raw"], word=p["word"], direction=Direction[p["direction"]],
            level=p["level"], ancestor=parse_pattern(p["ancestor"]),
            anchor=tuple(p["anchor"]),
            offsets=tuple(tuple(off) for off in p["offsets"]),
            addresses=tuple(CellAddress(*a) for a in p["addresses"]),
            nodes_expanded=p["nodes_expanded"],
            patterns_seen=p["patterns_seen"],
        )
        for p in data["placements"]
    )
    ans = data["answer"]
    window = None if ans is None else AnswerWindow(
        level=ans["level"], top=ans["top"], left=ans["left"],
        window=tuple(ans["window"]), found=ans["found"],
        x_top=ans["x_top"], x_left=ans["x_left"],
        x_rows=tuple(ans["x_rows"]),
        main_diagonal=ans["main_diagonal"],
        anti_diagonal=ans["anti_diagonal"],
        answer=ans["answer"],
    )
    return SolveReport(
        placements=placements,
        level_counts={int(k): v for k, v in data["level_counts"].items()},
        crossed_cells=frozenset(tuple(c) for c in data["crossed_cells"]),
        message=data["message"],
        level_sum=data["level_sum"],
        answer=window,
        nodes_expanded=data["nodes_expanded"],
        patterns_seen=data["patterns_seen"],
    )


def report_to_text(report: SolveReport) -> str:
    """Human-readable solve report."""
    lines = []
    width = max(len(p.raw) for p in report.placements)
    lines.append(f"{'WORD':<{width}}  {'DIR':>3}  {'LEVEL':>5}  ANCHOR/ANCESTOR")
    for p in report.placements:
        lines.append(
            f"{p.raw:<{width}}  {p.direction.name:>3}  {p.level:>5}  "
            f"{p.ancestor.text()} @ {p.anchor}"
        )
    counts = ", ".join(f"level {k}: {v}" for k, v in report.level_counts.items())
    lines.append("")
    lines.append(f"word counts by level: {counts}")
    lines.append(f"message: {report.message}")
    lines.append(f"level sum: {report.level_sum}")
    if report.answer is None:
        lines.append("no unique marker on level one; answer extraction skipped")
    elif report.answer.found:
        lines.append(f"answer block at level {report.answer.level}, "
                     f"rows from {report.answer.x_top}, cols from {report.answer.x_left}:")
        lines.extend("  " + row for row in report.answer.x_rows)
        lines.append(f"diagonals: {report.answer.main_diagonal} + "
                     f"{report.answer.anti_diagonal} -> {report.answer.answer}")
    else:
        lines.append("no marker-shaped answer found; raw window:")
        lines.extend("  " + row for row in report.answer.window)
    lines.append(f"search effort: {report.nodes_expanded} nodes expanded, "
                 f"{report.patterns_seen} distinct patterns")
    return "\n".join(lines)
