"""Desk-scale ground truth for the backward search.

Three instruments live here:

* forward materialized search: expand levels explicitly (vectorized with
  numpy, guarded by a cell cap) and scan for the word -- the independent
  route against which the backward search is validated;
* latest first appearance: the worst first-appearance level of a word
  over every possible start grid, computed exactly by enumerating the
  concrete fills of the word's ancestor patterns (adding letters to a
  start grid can only ground an ancestor earlier, so maximal setups are
  fills of single ancestor boxes);
* the exhaustive rule-set sweep: the latest first appearance over every
  rule assignment for a small alphabet, with re-validated witnesses.
"""

from __future__ import annotations

import itertools
import multiprocessing
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import bounds
from .ancestry import AncestrySearcher
from .core import Alphabet, Grid, RuleSet
from .errors import ResourceLimitError, UnknownLetterError
from .patterns import (
    ANTIDIAGONALS,
    DIAGONALS,
    WILDCARD,
    Direction,
    Pattern,
    two_diagonal_support,
    word_to_pattern,
)

DEFAULT_CELL_CAP = 10 ** 8
DEFAULT_CLOSURE_CAP = 10 ** 6
DEFAULT_FILL_CAP = 10 ** 6
SWEEP_RULESET_CAP = 10 ** 6


# ---------------------------------------------------------------------------
# forward materialized search
# ---------------------------------------------------------------------------

class _Materializer:
    """Vectorized level expansion over letter indexes."""

    def __init__(self, rules: RuleSet):
        self.rules = rules
        self.index = {ch: i for i, ch in enumerate(rules.alphabet.letters)}
        self.letters = rules.alphabet.letters
        rh, b = rules.rule_rows, rules.b
        blocks = np.empty((rules.n, rh, b), dtype=np.uint8)
        for ch, i in self.index.items():
            for br, row in enumerate(rules.rules[ch]):
                blocks[i, br] = [self.index[c] for c in row]
        self.blocks = blocks
        self.rh, self.b = rh, b

    def to_array(self, grid: Grid) -> np.ndarray:
        try:
            flat = [self.index[ch] for ch in grid.cells]
        except KeyError as exc:
            raise UnknownLetterError(f"grid letter {exc.args[0]!r} has no rule") from None
        return np.array(flat, dtype=np.uint8).reshape(grid.rows, grid.cols)

    def expand_once(self, arr: np.ndarray) -> np.ndarray:
        h, w = arr.shape
        out = self.blocks[arr]                      # (h, w, rh, b)
        return np.ascontiguousarray(
            out.transpose(0, 2, 1, 3).reshape(h * self.rh, w * self.b)
        )

    def to_grid(self, arr: np.ndarray, level: int) -> Grid:
        flat = "".join(self.letters[i] for i in arr.ravel())
        return Grid(arr.shape[0], arr.shape[1], flat, level)

    def contains(self, arr: np.ndarray, pattern: Pattern) -> bool:
        h, w = arr.shape
        if pattern.rows > h or pattern.cols > w:
            return False
        oh, ow = h - pattern.rows + 1, w - pattern.cols + 1
        mask: np.ndarray | None = None
        for r, c, ch in pattern.concrete_cells():
            hit = arr[r:r + oh, c:c + ow] == self.index[ch]
            mask = hit if mask is None else (mask & hit)
            if not mask.any():
                return False
        return bool(mask.any())


def materialize(l1: Grid, rules: RuleSet, level: int, *,
                cell_cap: int = DEFAULT_CELL_CAP) -> Grid:
    """Explicitly build the given level; independent of core.expand."""
    rows, cols = l1.rows, l1.cols
    eng = _Materializer(rules)
    arr = eng.to_array(l1)
    for _ in range(level - 1):
        rows, cols = rows * eng.rh, cols * eng.b
        if rows * cols > cell_cap:
            raise ResourceLimitError(
                f"level needs {rows * cols} cells, cap is {cell_cap}")
        arr = eng.expand_once(arr)
    return eng.to_grid(arr, level)


def forward_first_appearance(word: str, direction: Direction, l1: Grid,
                             rules: RuleSet, max_level: int, *,
                             cell_cap: int = DEFAULT_CELL_CAP) -> int | None:
    """First level (<= max_level) containing the word, by expanding and
    scanning every level; None if absent throughout."""
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    if l1.level != 1:
        raise ValueError("start grid must be tagged level 1")
    bad = set(word) - set(rules.alphabet.letters)
    if bad:
        raise UnknownLetterError(f"word uses letters outside the alphabet: {sorted(bad)}")
    pattern = word_to_pattern(word, direction)
    eng = _Materializer(rules)
    arr = eng.to_array(l1)
    rows, cols = l1.rows, l1.cols
    for level in range(1, max_level + 1):
        if level > 1:
            rows, cols = rows * eng.rh, cols * eng.b
            if rows * cols > cell_cap:
                raise ResourceLimitError(
                    f"level {level} needs {rows * cols} cells, cap is {cell_cap}")
            arr = eng.expand_once(arr)
        if eng.contains(arr, pattern):
            return level
    return None


# ---------------------------------------------------------------------------
# latest first appearance over all start grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatestResult:
    level: int | None
    l1: Grid | None          # a start grid attaining the level


def _fills(pattern: Pattern, letters: tuple[str, ...], cap: int):
    """All concrete grids obtained by filling the pattern's wildcards,
    in lexicographic fill order."""
    holes = [i for i, ch in enumerate(pattern.cells) if ch == WILDCARD]
    if len(letters) ** len(holes) > cap:
        raise ResourceLimitError(
            f"{len(letters) ** len(holes)} fills of {pattern.text()!r} exceed cap {cap}")
    chars = list(pattern.cells)
    for combo in itertools.product(letters, repeat=len(holes)):
        for i, ch in zip(holes, combo):
            chars[i] = ch
        yield Grid(pattern.rows, pattern.cols, "".join(chars), 1)


def _occurs_in(pattern: Pattern, grid: Grid) -> bool:
    if pattern.rows > grid.rows or pattern.cols > grid.cols:
        return False
    lines = grid.lines()
    cells = list(pattern.concrete_cells())
    for r0 in range(grid.rows - pattern.rows + 1):
        for c0 in range(grid.cols - pattern.cols + 1):
            if all(lines[r0 + r][c0 + c] == ch for r, c, ch in cells):
                return True
    return False


def latest_with_searcher(searcher: AncestrySearcher, word: str,
                         direction: Direction, *,
                         closure_cap: int = DEFAULT_CLOSURE_CAP,
                         fill_cap: int = DEFAULT_FILL_CAP) -> LatestResult:
    """Worst-case first-appearance level of a word over all start grids.

    The candidate start grids are exactly the concrete fills of the
    word's ancestor patterns: for any start grid, restricting it to the
    box of a minimal-depth grounded ancestor preserves the first level,
    so the maximum is attained on such a fill.  An ancestor at depth d
    yields first level at most d+1, so deeper ancestors are tried first
    and the scan stops once no remaining depth can improve the best.
    """
    rules = searcher.rules
    bad = set(word) - set(rules.alphabet.letters)
    if bad:
        raise UnknownLetterError(f"word uses letters outside the alphabet: {sorted(bad)}")
    target = word_to_pattern(word, direction)
    depths = searcher.closure(target, max_patterns=closure_cap)
    by_depth_asc: list[list[Pattern]] = [[] for _ in range(max(depths.values()) + 1)]
    for pat, d in depths.items():
        by_depth_asc[d].append(pat)
    for group in by_depth_asc:
        group.sort()
    best = LatestResult(None, None)
    letters = rules.alphabet.letters
    for d in range(len(by_depth_asc) - 1, -1, -1):
        if best.level is not None and d + 1 <= best.level:
            break
        for pat in by_depth_asc[d]:
            for candidate in _fills(pat, letters, fill_cap):
                first = None
                for d2, group in enumerate(by_depth_asc):
                    if any(_occurs_in(p, candidate) for p in group):
                        first = d2 + 1
                        break
                if first is not None and (best.level is None or first > best.level):
                    best = LatestResult(first, candidate)
    return best


def latest_first_appearance(word: str, direction: Direction, rules: RuleSet, *,
                            closure_cap: int = DEFAULT_CLOSURE_CAP,
                            fill_cap: int = DEFAULT_FILL_CAP) -> int | None:
    """Level form of :func:`latest_with_searcher` for one-off calls."""
    searcher = AncestrySearcher(rules)
    return latest_with_searcher(searcher, word, direction,
                                closure_cap=closure_cap,
                                fill_cap=fill_cap).level


# ---------------------------------------------------------------------------
# exhaustive rule-set sweep
# ---------------------------------------------------------------------------

def _sweep_blocks(letters: tuple[str, ...], b: int, dimension: int):
    rh = 1 if dimension == 1 else b
    rows = ["".join(p) for p in itertools.product(letters, repeat=b)]
    return [tuple(block) for block in itertools.product(rows, repeat=rh)]


def _ruleset_by_index(index: int, letters: tuple[str, ...], b: int,
                      dimension: int, blocks) -> RuleSet:
    n = len(letters)
    digits = []
    for _ in range(n):
        index, d = divmod(index, len(blocks))
        digits.append(d)
    assignment = {ch: blocks[d] for ch, d in zip(letters, reversed(digits))}
    return RuleSet(Alphabet(letters), dimension, b, assignment)


def _sweep_words(letters: tuple[str, ...], word_len_cap: int):
    for length in range(1, word_len_cap + 1):
        for combo in itertools.product(letters, repeat=length):
            yield "".join(combo)


def _sweep_chunk(args) -> tuple[list[int], dict]:
    """Worker: latest levels for every (rule set, word) in an index range.

    Returns the per-rule-set maxima plus the best witness per word length,
    keyed for a deterministic merge.
    """
    letters, b, dimension, word_len_cap, start, stop = args
    blocks = _sweep_blocks(letters, b, dimension)
    directions = (Direction.E,) if dimension == 1 else (Direction.E, Direction.SE)
    words = list(_sweep_words(letters, word_len_cap))
    per_ruleset: list[int] = []
    # word length -> (level, ruleset text, word, l1 text, ruleset index)
    best: dict[int, tuple] = {}
    for idx in range(start, stop):
        rules = _ruleset_by_index(idx, letters, b, dimension, blocks)
        searcher = AncestrySearcher(rules)
        rs_max = 0
        rs_text = None
        for word in words:
            for direction in directions:
                got = latest_with_searcher(searcher, word, direction)
                if got.level is None:
                    continue
                rs_max = max(rs_max, got.level)
                prev = best.get(len(word))
                if rs_text is None:
                    rs_text = rules.text()
                key = (got.level, rs_text, word, got.l1.text(), idx, direction.name)
                if (prev is None or key[0] > prev[0]
                        or (key[0] == prev[0] and key[1:4] < prev[1:4])):
                    best[len(word)] = key
        per_ruleset.append(rs_max)
    return per_ruleset, best


@dataclass(frozen=True)
class SweepReport:
    """Outcome of an exhaustive rule-set sweep."""

    n: int
    b: int
    dimension: int
    word_len_cap: int
    global_max: int
    witness_rules: str
    witness_word: str
    witness_l1: str
    witness_direction: str
    per_length_max: dict[int, int]
    per_ruleset_max: tuple[int, ...]
    ruleset_count: int
    validated: bool

    def histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.per_ruleset_max).items()))

    def to_json_dict(self) -> dict:
        return {
            "n": self.n, "b": self.b, "dimension": self.dimension,
            "word_len_cap": self.word_len_cap,
            "global_max": self.global_max,
            "witness": {
                "rules": self.witness_rules,
                "word": self.witness_word,
                "l1": self.witness_l1,
                "direction": self.witness_direction,
            },
            "per_length_max": {str(k): v for k, v in sorted(self.per_length_max.items())},
            "histogram": {str(k): v for k, v in self.histogram().items()},
            "ruleset_count": self.ruleset_count,
            "validated": self.validated,
            "per_ruleset_max": list(self.per_ruleset_max),
        }


def sweep_max_latest(n: int, b: int = 2, dimension: int = 1,
                     word_len_cap: int = 2, *, jobs: int = 1,
                     ruleset_cap: int = SWEEP_RULESET_CAP) -> SweepReport:
    """Global latest first-appearance level over every rule assignment
    for an n-letter alphabet, all words up to ``word_len_cap``.

    The witness is re-validated by forward expansion before the report
    is returned.  Embarrassingly parallel over rule sets; results merge
    deterministically whatever the chunking.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    letters = tuple("ABCDEFGHIJKLMNOPQRSTUVWXYZ"[:n])
    blocks = _sweep_blocks(letters, b, dimension)
    count = len(blocks) ** n
    if count > ruleset_cap:
        raise ResourceLimitError(
            f"{count} rule sets exceed the sweep cap {ruleset_cap}")
    chunk_size = max(1, count // (jobs * 8) if jobs > 1 else count)
    chunks = [
        (letters, b, dimension, word_len_cap, lo, min(lo + chunk_size, count))
        for lo in range(0, count, chunk_size)
    ]
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            parts = pool.map(_sweep_chunk, chunks)
    else:
        parts = [_sweep_chunk(chunk) for chunk in chunks]
    per_ruleset: list[int] = []
    best: dict[int, tuple] = {}
    for chunk_max, chunk_best in parts:
        per_ruleset.extend(chunk_max)
        for length, key in chunk_best.items():
            prev = best.get(length)
            if (prev is None or key[0] > prev[0]
                    or (key[0] == prev[0] and key[1:4] < prev[1:4])):
                best[length] = key
    global_key = None
    for key in best.values():
        if (global_key is None or key[0] > global_key[0]
                or (key[0] == global_key[0] and key[1:4] < global_key[1:4])):
            global_key = key
    if global_key is None:
        raise ResourceLimitError("sweep produced no witness")
    level, rules_text, word, l1_text, idx, direction_name = global_key
    # Re-validate every per-length witness by direct forward expansion.
    validated = True
    for length, key in sorted(best.items()):
        wlevel, _, wword, wl1, widx, wdir = key
        wrules = _ruleset_by_index(widx, letters, b, dimension, blocks)
        got = forward_first_appearance(
            wword, Direction[wdir], Grid.from_text(wl1), wrules, wlevel)
        if got != wlevel:
            validated = False
    report = SweepReport(
        n=n, b=b, dimension=dimension, word_len_cap=word_len_cap,
        global_max=level, witness_rules=rules_text, witness_word=word,
        witness_l1=l1_text, witness_direction=direction_name,
        per_length_max={length: key[0] for length, key in sorted(best.items())},
        per_ruleset_max=tuple(per_ruleset),
        ruleset_count=count,
        validated=validated,
    )
    if not validated:
        raise ResourceLimitError("sweep witness failed forward re-validation")
    return report


# ---------------------------------------------------------------------------
# randomized backward/forward agreement harness
# ---------------------------------------------------------------------------

_L_SHAPES_MAIN = (frozenset({(0, 0), (1, 0), (1, 1)}),
                  frozenset({(0, 0), (0, 1), (1, 1)}))
_L_SHAPES_ANTI = (frozenset({(0, 1), (1, 0), (1, 1)}),
                  frozenset({(0, 0), (0, 1), (1, 0)}))


@dataclass(frozen=True)
class AgreementReport:
    """Tally of randomized backward-vs-forward comparison runs."""

    instances: int
    found_both: int
    never_both: int
    beyond_horizon: int          # backward found deeper than the forward horizon
    mismatches: tuple[str, ...]
    bound_violations: tuple[str, ...]
    geometry_violations: tuple[str, ...]
    confinement_violations: tuple[str, ...]

    @property
    def clean(self) -> bool:
        return not (self.mismatches or self.bound_violations
                    or self.geometry_violations or self.confinement_violations)

    def to_json_dict(self) -> dict:
        return {
            "instances": self.instances,
            "found_both": self.found_both,
            "never_both": self.never_both,
            "beyond_horizon": self.beyond_horizon,
            "mismatches": list(self.mismatches),
            "bound_violations": list(self.bound_violations),
            "geometry_violations": list(self.geometry_violations),
            "confinement_violations": list(self.confinement_violations),
            "clean": self.clean,
        }


def random_instance(rng, *, max_n: int = 4, b: int = 2,
                    max_side: int = 4, max_word: int = 4):
    """One random (rules, l1, word, direction) quadruple."""
    dimension = rng.choice((1, 2))
    n = rng.randint(1, max_n)
    letters = tuple("ABCD"[:n])
    rh = 1 if dimension == 1 else b
    rules = RuleSet(
        Alphabet(letters), dimension, b,
        {ch: tuple("".join(rng.choice(letters) for _ in range(b))
                   for _ in range(rh))
         for ch in letters},
    )
    rows = 1 if dimension == 1 else rng.randint(1, max_side)
    cols = rng.randint(1, max_side)
    l1 = Grid(rows, cols,
              "".join(rng.choice(letters) for _ in range(rows * cols)), 1)
    word = "".join(rng.choice(letters) for _ in range(rng.randint(1, max_word)))
    direction = rng.choice(
        (Direction.E, Direction.W) if dimension == 1 else tuple(Direction))
    return rules, l1, word, direction


def check_instance(rules: RuleSet, l1: Grid, word: str, direction: Direction,
                   *, max_level: int = 10) -> dict:
    """Run both search routes on one instance and audit the invariants.

    Returns a dict of issue lists (empty when everything agrees) plus the
    outcome classification.
    """
    searcher = AncestrySearcher(rules, l1)
    res = searcher.search(word, direction, keep_visited=True)
    fwd = forward_first_appearance(word, direction, l1, rules, max_level)
    desc = (f"dim={rules.dimension} n={rules.n} rules={rules.text()} "
            f"l1={l1.text()} word={word} dir={direction.name}")
    issues: dict[str, list[str]] = {
        "mismatch": [], "bound": [], "geometry": [], "confinement": []}
    if res.found and res.level <= max_level:
        outcome = "found"
        if fwd != res.level:
            issues["mismatch"].append(
                f"{desc}: backward {res.level}, forward {fwd}")
    elif res.found:
        outcome = "beyond"
        if fwd is not None:
            issues["mismatch"].append(
                f"{desc}: backward {res.level}, forward already {fwd}")
    else:
        outcome = "never"
        if fwd is not None:
            issues["mismatch"].append(
                f"{desc}: backward never, forward {fwd}")
    if res.found:
        diagonal = direction in DIAGONALS
        limit = (bounds.w2(rules.b, rules.n, len(word)) if diagonal
                 else bounds.w1(rules.b, rules.n, len(word)))
        if res.level > limit:
            issues["bound"].append(f"{desc}: level {res.level} > bound {limit}")
    anti = direction in ANTIDIAGONALS
    shapes = _L_SHAPES_ANTI if anti else _L_SHAPES_MAIN
    for pat, _depth in res.visited:
        for q in searcher.parent_patterns(pat):
            if (q.rows > bounds.max_parent_len(pat.rows, rules.b)
                    or q.cols > bounds.max_parent_len(pat.cols, rules.b)):
                issues["geometry"].append(
                    f"{desc}: parent {q.text()} of {pat.text()} too large")
        if direction in DIAGONALS:
            if not two_diagonal_support(pat, anti=anti):
                issues["confinement"].append(
                    f"{desc}: ancestor {pat.text()} off the diagonal band")
            if pat.rows <= 2 and pat.cols <= 2:
                concrete = frozenset(
                    (r, c) for r, c, _ in pat.concrete_cells())
                if len(concrete) > 3 or (
                        len(concrete) == 3 and concrete not in shapes):
                    issues["confinement"].append(
                        f"{desc}: bad 2x2 ancestor {pat.text()}")
    return {"outcome": outcome, "issues": issues}


def run_agreement(instances: int = 1000, seed: int = 2013, *,
                  max_level: int = 10, max_n: int = 4, b: int = 2,
                  max_side: int = 4, max_word: int = 4) -> AgreementReport:
    """Randomized backward/forward equivalence audit; deterministic for a
    given seed."""
    import random

    rng = random.Random(seed)
    tallies = Counter()
    issue_lists: dict[str, list[str]] = {
        "mismatch": [], "bound": [], "geometry": [], "confinement": []}
    for _ in range(instances):
        rules, l1, word, direction = random_instance(
            rng, max_n=max_n, b=b, max_side=max_side, max_word=max_word)
        got = check_instance(rules, l1, word, direction, max_level=max_level)
        tallies[got["outcome"]] += 1
        for kind, items in got["issues"].items():
            issue_lists[kind].extend(items)
    return AgreementReport(
        instances=instances,
        found_both=tallies["found"],
        never_both=tallies["never"],
        beyond_horizon=tallies["beyond"],
        mismatches=tuple(issue_lists["mismatch"]),
        bound_violations=tuple(issue_lists["bound"]),
        geometry_violations=tuple(issue_lists["geometry"]),
        confinement_violations=tuple(issue_lists["confinement"]),
    )
