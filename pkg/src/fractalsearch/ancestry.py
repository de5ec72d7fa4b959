"""Backward search: who could have produced this pattern?

The replacement map sends level k to level k+1, so instead of growing
levels until a word shows up (they grow exponentially), we enumerate the
patterns on level k-1 whose expansion can contain the word -- its
*parents* -- and walk that relation breadth-first.  A pattern occurring
in the concrete start grid at depth d proves the word appears on level
d+1; an exhausted frontier proves it never appears.

Termination needs no depth cap: parent bounding boxes never grow
(each side shrinks to ceil((s+b-1)/b)), so the set of reachable trimmed
patterns is finite and the memoized frontier must eventually empty.

Everything here is deterministic: frontiers are expanded in sorted
order, candidate letters in alphabet order, and the reported witness is
the smallest (depth, start-grid row, start-grid col, pattern text).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .core import CellAddress, Grid, RuleSet, letter_at
from .errors import (
    ResourceLimitError,
    UnknownLetterError,
    UnresolvedSearchError,
    WitnessError,
)
from .patterns import (
    WILDCARD,
    Direction,
    Pattern,
    is_trimmed,
    word_to_pattern,
)

DEFAULT_PRODUCT_CAP = 10 ** 6


@dataclass(frozen=True)
class SearchStats:
    nodes_expanded: int
    patterns_seen: int


@dataclass(frozen=True)
class SearchResult:
    """Outcome of one backward search.

    ``found`` results carry the earliest level, the ancestor pattern
    grounded in the start grid, its 1-indexed anchor position there, and
    the per-step alignment offsets from the ancestor down to the target
    (enough to reconstruct exact coordinates on any level).  A negative
    result means the frontier reached a fixpoint: the word can never
    appear for this start grid.
    """

    word: str
    direction: Direction | None      # None for raw pattern searches
    found: bool
    level: int | None
    ancestor: Pattern | None
    anchor: tuple[int, int] | None
    offsets: tuple[tuple[int, int], ...]
    target: Pattern
    max_depth: int
    stats: SearchStats
    visited: tuple[tuple[Pattern, int], ...] | None = None

    def __post_init__(self):
        if self.found and self.level != len(self.offsets) + 1:
            raise WitnessError(
                f"level {self.level} inconsistent with offset chain "
                f"of length {len(self.offsets)}"
            )


class AncestrySearcher:
    """Parent enumeration and backward search for one rule set.

    Caches parents and grounding positions per pattern, so reuse one
    instance when searching many words against the same rules and start
    grid (the deep ancestor space overlaps heavily between words).
    """

    def __init__(self, rules: RuleSet, l1: Grid | None = None, *,
                 product_cap: int = DEFAULT_PRODUCT_CAP):
        if product_cap < 1:
            raise ValueError("product cap must be positive")
        if l1 is not None:
            if l1.level != 1:
                raise ValueError("start grid must be tagged level 1")
            bad = set(l1.cells) - set(rules.alphabet.letters)
            if bad:
                raise UnknownLetterError(
                    f"start grid uses letters outside the alphabet: {sorted(bad)}")
        self.rules = rules
        self.l1 = l1
        self.product_cap = product_cap
        self._letters = rules.alphabet.letters
        self._letter_ok = frozenset(self._letters) | {WILDCARD}
        # Bitmask of parent letters whose block has `ch` at (br, bc);
        # candidate sets intersect via &.
        table: dict[tuple[int, int, str], int] = {}
        for bi, parent in enumerate(self._letters):
            block = rules.rules[parent]
            for br, row in enumerate(block):
                for bc, ch in enumerate(row):
                    key = (br, bc, ch)
                    table[key] = table.get(key, 0) | (1 << bi)
        self._table = table
        self._mask_options: dict[int, tuple[str, ...]] = {}
        self._parents: dict[Pattern, tuple[tuple[Pattern, tuple[int, int]], ...]] = {}
        self._grounds: dict[Pattern, tuple[tuple[int, int], ...]] = {}
        self._l1_lines = l1.lines() if l1 is not None else None

    # -- parent enumeration -------------------------------------------------

    def _options(self, mask: int) -> tuple[str, ...]:
        opts = self._mask_options.get(mask)
        if opts is None:
            opts = tuple(
                ch for i, ch in enumerate(self._letters) if mask >> i & 1
            )
            self._mask_options[mask] = opts
        return opts

    def parents(self, pattern: Pattern) -> tuple[tuple[Pattern, tuple[int, int]], ...]:
        """All (parent, offset) pairs, deduplicated on the parent pattern.

        The offset (dr, dc) locates the child's top-left corner inside
        the expansion of the parent's box.  For each offset the parent
        box is ceil((dr+rows)/rh) x ceil((dc+cols)/b); a parent cell
        overlapping concrete child cells ranges over exactly the letters
        whose block matches them all, and a cell overlapping only
        wildcards stays a wildcard.  Outputs are trimmed by construction
        (every border row/column of the box meets a concrete child cell).
        """
        cached = self._parents.get(pattern)
        if cached is not None:
            return cached
        if not self._letter_ok.issuperset(pattern.cells):
            raise UnknownLetterError(
                f"pattern {pattern.text()!r} uses letters outside the alphabet"
            )
        rows, cols, cells = pattern
        rh, b = self.rules.rule_rows, self.rules.b
        table = self._table
        out: list[tuple[Pattern, tuple[int, int]]] = []
        seen: set[Pattern] = set()
        for dr in range(rh):
            pr = (dr + rows + rh - 1) // rh
            for dc in range(b):
                pc = (dc + cols + b - 1) // b
                options: list[tuple[str, ...]] = []
                dead = False
                for pi in range(pr):
                    rlo = pi * rh - dr
                    r0 = rlo if rlo > 0 else 0
                    r1 = min(rows, rlo + rh)
                    for pj in range(pc):
                        clo = pj * b - dc
                        c0 = clo if clo > 0 else 0
                        c1 = min(cols, clo + b)
                        mask = -1
                        for r in range(r0, r1):
                            base = r * cols
                            for c in range(c0, c1):
                                ch = cells[base + c]
                                if ch == WILDCARD:
                                    continue
                                mask &= table.get((r - rlo, c - clo, ch), 0)
                                if not mask:
                                    dead = True
                                    break
                            if dead:
                                break
                        if dead:
                            break
                        options.append(
                            (WILDCARD,) if mask == -1 else self._options(mask)
                        )
                    if dead:
                        break
                if dead:
                    continue
                total = 1
                for opt in options:
                    total *= len(opt)
                if total > self.product_cap:
                    raise ResourceLimitError(
                        f"parent product {total} exceeds cap {self.product_cap} "
                        f"for pattern {pattern.text()!r} at offset ({dr}, {dc})"
                    )
                off = (dr, dc)
                for combo in itertools.product(*options):
                    q = Pattern(pr, pc, "".join(combo))
                    if q not in seen:
                        seen.add(q)
                        out.append((q, off))
        result = tuple(out)
        self._parents[pattern] = result
        return result

    def parent_patterns(self, pattern: Pattern) -> set[Pattern]:
        return {q for q, _ in self.parents(pattern)}

    # -- grounding -----------------------------------------------------------

    def ground_positions(self, pattern: Pattern) -> tuple[tuple[int, int], ...]:
        """1-indexed positions where the pattern occurs in the start grid,
        row-major; cached per pattern."""
        if self._l1_lines is None:
            raise ValueError("searcher was built without a start grid")
        cached = self._grounds.get(pattern)
        if cached is not None:
            return cached
        lines = self._l1_lines
        grows, gcols = len(lines), len(lines[0])
        cells = list(pattern.concrete_cells())
        found: list[tuple[int, int]] = []
        for r0 in range(grows - pattern.rows + 1):
            for c0 in range(gcols - pattern.cols + 1):
                if all(lines[r0 + r][c0 + c] == ch for r, c, ch in cells):
                    found.append((r0 + 1, c0 + 1))
        result = tuple(found)
        self._grounds[pattern] = result
        return result

    # -- search ---------------------------------------------------------------

    def search(self, word: str, direction: Direction, *,
               depth_cap: int | None = None,
               keep_visited: bool = False) -> SearchResult:
        """Earliest level on which the word appears for the start grid."""
        return self._run_search(word, direction, word_to_pattern(word, direction),
                                depth_cap, keep_visited)

    def search_pattern(self, target: Pattern, *,
                       depth_cap: int | None = None,
                       keep_visited: bool = False) -> SearchResult:
        """Earliest level of an arbitrary letter/wildcard pattern."""
        return self._run_search(target.text(), None, target,
                                depth_cap, keep_visited)

    def _run_search(self, word: str, direction: Direction | None,
                    target: Pattern, depth_cap: int | None,
                    keep_visited: bool) -> SearchResult:
        run = LayeredSearch(self, target)
        while True:
            grounded = run.check_grounding()
            if grounded is not None:
                return run.result_found(word, direction, grounded, keep_visited)
            explored = run.depth
            if not run.advance():
                return run.result_never(word, direction, explored, keep_visited)
            if depth_cap is not None and run.depth > depth_cap:
                raise UnresolvedSearchError(
                    f"depth cap {depth_cap} reached with "
                    f"{len(run.frontier)} open patterns for {word!r}",
                    depth=run.depth,
                    nodes_expanded=run.nodes_expanded,
                    patterns_seen=len(run.links),
                )

    def closure(self, target: Pattern, *,
                max_patterns: int | None = None) -> dict[Pattern, int]:
        """Minimal depth of every ancestor pattern reachable from the
        target, target included at depth 0.  No grounding involved."""
        depths = {target: 0}
        frontier = [target]
        while frontier:
            nxt: list[Pattern] = []
            for pat in sorted(frontier):
                d = depths[pat] + 1
                for q, _ in self.parents(pat):
                    if q not in depths:
                        depths[q] = d
                        nxt.append(q)
            if max_patterns is not None and len(depths) > max_patterns:
                raise ResourceLimitError(
                    f"ancestor closure exceeds {max_patterns} patterns"
                )
            frontier = nxt
        return depths


class LayeredSearch:
    """One backward search, advanced a depth layer at a time.

    Split out from :meth:`AncestrySearcher.search` so that several
    directions can be stepped in lockstep and stopped at the first
    grounded depth (the puzzle solver wants the minimum level over
    directions without exhausting the losers).
    """

    def __init__(self, searcher: AncestrySearcher, target: Pattern):
        if not is_trimmed(target):
            raise ValueError(f"target pattern {target.text()!r} is not trimmed")
        self.searcher = searcher
        self.target = target
        self.links: dict[Pattern, tuple[Pattern, tuple[int, int]] | None] = {
            target: None
        }
        self.frontier: list[Pattern] = [target]
        self.depth = 0
        self.nodes_expanded = 0

    def check_grounding(self) -> tuple[tuple[int, int], Pattern] | None:
        """Smallest (row, col, pattern text) grounding of the current
        frontier in the start grid, or None."""
        best: tuple[tuple[int, int, str], tuple[int, int], Pattern] | None = None
        for pat in self.frontier:
            pos = self.searcher.ground_positions(pat)
            if pos:
                key = (pos[0][0], pos[0][1], pat.text())
                if best is None or key < best[0]:
                    best = (key, pos[0], pat)
        if best is None:
            return None
        return best[1], best[2]

    def advance(self) -> bool:
        """Expand the frontier one level up; False once exhausted."""
        links = self.links
        nxt: list[Pattern] = []
        for pat in sorted(self.frontier):
            for q, off in self.searcher.parents(pat):
                if q not in links:
                    links[q] = (pat, off)
                    nxt.append(q)
        self.nodes_expanded += len(self.frontier)
        self.frontier = nxt
        self.depth += 1
        return bool(nxt)

    def _chain(self, ancestor: Pattern) -> tuple[tuple[int, int], ...]:
        offsets: list[tuple[int, int]] = []
        cur = ancestor
        while True:
            link = self.links[cur]
            if link is None:
                break
            child, off = link
            offsets.append(off)
            cur = child
        if cur != self.target:
            raise WitnessError("offset chain does not reach the target pattern")
        return tuple(offsets)

    def _stats(self) -> SearchStats:
        return SearchStats(self.nodes_expanded, len(self.links))

    def _visited(self) -> tuple[tuple[Pattern, int], ...]:
        depth_of: dict[Pattern, int] = {self.target: 0}
        order: list[Pattern] = [self.target]
        # links only ever point from a pattern to the strictly shallower
        # pattern it was discovered from, so depths resolve in one pass
        # over insertion order.
        for pat, link in self.links.items():
            if link is None:
                continue
            child, _ = link
            depth_of[pat] = depth_of[child] + 1
            order.append(pat)
        return tuple((pat, depth_of[pat]) for pat in order)

    def result_found(self, word: str, direction: Direction | None,
                     grounded: tuple[tuple[int, int], Pattern],
                     keep_visited: bool = False) -> SearchResult:
        anchor, ancestor = grounded
        offsets = self._chain(ancestor)
        return SearchResult(
            word=word, direction=direction, found=True,
            level=self.depth + 1, ancestor=ancestor, anchor=anchor,
            offsets=offsets, target=self.target, max_depth=self.depth,
            stats=self._stats(),
            visited=self._visited() if keep_visited else None,
        )

    def result_never(self, word: str, direction: Direction | None, explored: int,
                     keep_visited: bool = False) -> SearchResult:
        return SearchResult(
            word=word, direction=direction, found=False,
            level=None, ancestor=None, anchor=None,
            offsets=(), target=self.target, max_depth=explored,
            stats=self._stats(),
            visited=self._visited() if keep_visited else None,
        )


# ---------------------------------------------------------------------------
# module-level convenience wrappers
# ---------------------------------------------------------------------------

def enumerate_parents(pattern: Pattern, rules: RuleSet, *,
                      product_cap: int = DEFAULT_PRODUCT_CAP) -> set[Pattern]:
    """Every trimmed pattern whose expansion can contain ``pattern``."""
    if not is_trimmed(pattern):
        raise ValueError(f"pattern {pattern.text()!r} is not trimmed")
    searcher = AncestrySearcher(rules, product_cap=product_cap)
    return searcher.parent_patterns(pattern)


def first_appearance(word: str, direction: Direction, l1: Grid,
                     rules: RuleSet, depth_cap: int | None = None, *,
                     product_cap: int = DEFAULT_PRODUCT_CAP,
                     keep_visited: bool = False) -> SearchResult:
    """Earliest level on which ``word`` (read along ``direction``) appears
    when starting from ``l1``, found without materializing any level."""
    searcher = AncestrySearcher(rules, l1, product_cap=product_cap)
    return searcher.search(word, direction, depth_cap=depth_cap,
                           keep_visited=keep_visited)


def witness_coordinates(result: SearchResult, l1: Grid,
                        rules: RuleSet) -> list[CellAddress]:
    """Absolute addresses of the word's letters on its level, in word
    order, rebuilt from the grounded anchor and the offset chain.  Every
    address is re-checked against the coordinate oracle; a mismatch is a
    bug, not bad input."""
    if not result.found:
        raise ValueError("witness coordinates exist only for found results")
    rh, b = rules.rule_rows, rules.b
    r, c = result.anchor
    level = 1
    for dr, dc in result.offsets:
        r = (r - 1) * rh + 1 + dr
        c = (c - 1) * b + 1 + dc
        level += 1
    if level != result.level:
        raise WitnessError("offset chain length disagrees with found level")
    if result.direction is None:
        # Raw pattern search: report concrete cells in reading order.
        walk = list(result.target.concrete_cells())
    else:
        n = len(result.word)
        dr, dc = result.direction.value
        rr = n - 1 if dr < 0 else 0
        cc = n - 1 if dc < 0 else 0
        walk = []
        for ch in result.word:
            walk.append((rr, cc, ch))
            rr += dr
            cc += dc
    addrs: list[CellAddress] = []
    for rr, cc, ch in walk:
        addr = CellAddress(level, r + rr, c + cc)
        got = letter_at(l1, rules, addr)
        if got != ch:
            raise WitnessError(
                f"coordinate oracle says {got!r} at {addr}, witness says {ch!r}"
            )
        addrs.append(addr)
    return addrs


# ---------------------------------------------------------------------------
# ancestor trees
# ---------------------------------------------------------------------------

@dataclass
class TreeNode:
    """Node of an exploration tree; ``children`` are the pattern's parents.

    Statuses: ``interior`` (has fresh parents), ``no-parents`` (can only
    occur on level 1), ``repeat`` (everything above it was already
    charted), ``grounded`` (occurs in the start grid, search stops).
    """

    pattern: Pattern
    depth: int
    status: str = "interior"
    children: list["TreeNode"] = field(default_factory=list)

    def leaves(self) -> list["TreeNode"]:
        if not self.children:
            return [self]
        out: list[TreeNode] = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def max_depth(self) -> int:
        return max([self.depth] + [child.max_depth() for child in self.children])

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern.text(),
            "depth": self.depth,
            "status": self.status,
            "children": [child.to_dict() for child in self.children],
        }


def ancestor_tree(word: str, direction: Direction, rules: RuleSet,
                  l1: Grid | None = None, *,
                  product_cap: int = DEFAULT_PRODUCT_CAP) -> TreeNode:
    """Full backward exploration tree for a word.

    A parent already seen on a strictly shallower layer is ignored
    (whatever lies above it is already charted there); a parent first
    seen on the same layer is shown once more as a ``repeat`` leaf.
    Grounded and parentless patterns stop their branch.
    """
    searcher = AncestrySearcher(rules, l1, product_cap=product_cap)
    root = TreeNode(word_to_pattern(word, direction), 0)
    seen: dict[Pattern, int] = {root.pattern: 0}
    layer = [root]
    while layer:
        nxt: list[TreeNode] = []
        for node in sorted(layer, key=lambda nd: nd.pattern):
            if l1 is not None and searcher.ground_positions(node.pattern):
                node.status = "grounded"
                continue
            parents = searcher.parents(node.pattern)
            if not parents:
                node.status = "no-parents"
                continue
            for q, _ in parents:
                prior = seen.get(q)
                if prior is not None and prior <= node.depth:
                    continue
                if prior == node.depth + 1:
                    node.children.append(TreeNode(q, prior, "repeat"))
                else:
                    seen[q] = node.depth + 1
                    child = TreeNode(q, node.depth + 1)
                    node.children.append(child)
                    nxt.append(child)
            if not node.children:
                node.status = "repeat"
        layer = nxt
    return root


def tree_to_json(root: TreeNode, indent: int | None = 2) -> str:
    return json.dumps(root.to_dict(), indent=indent)


def tree_to_dot(root: TreeNode) -> str:
    """Edge-list rendering for graphviz dot."""
    lines = ["digraph ancestors {", '  rankdir="BT";',
             '  node [shape=box, fontname="monospace"];']
    counter = itertools.count()

    def emit(node: TreeNode) -> str:
        name = f"n{next(counter)}"
        shape = {"grounded": "doubleoctagon", "no-parents": "octagon"}.get(
            node.status)
        attrs = f'label="{node.pattern.text()}"'
        if shape:
            attrs += f", shape={shape}"
        if node.status == "repeat":
            attrs += ", style=dashed"
        lines.append(f"  {name} [{attrs}];")
        for child in node.children:
            cname = emit(child)
            lines.append(f"  {name} -> {cname};")
        return name

    emit(root)
    lines.append("}")
    return "\n".join(lines)
