from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractalsearch import (
    AncestrySearcher,
    Alphabet,
    Direction,
    Grid,
    Pattern,
    ResourceLimitError,
    RuleSet,
    UnresolvedSearchError,
    WILDCARD,
    ancestor_tree,
    enumerate_parents,
    descendant_block_range,
    expand,
    first_appearance,
    is_trimmed,
    max_parent_len,
    occurrences,
    parse_pattern,
    tree_to_dot,
    tree_to_json,
    witness_coordinates,
    word_to_pattern,
)
from tests.conftest import grids_for, rule_sets


def parents_of(word_or_pattern, rules, direction=Direction.E):
    if isinstance(word_or_pattern, str):
        word_or_pattern = word_to_pattern(word_or_pattern, direction)
    return {p.text() for p in enumerate_parents(word_or_pattern, rules)}


class TestEnumerateParents:
    def test_cab_has_unique_parent(self, abc_1d):
        assert parents_of("CAB", abc_1d) == {"BA"}

    def test_ba_has_four_parents(self, abc_1d):
        assert parents_of("BA", abc_1d) == {"AA", "AB", "CA", "CB"}

    def test_cacaba_has_two_parents(self, abc_1d):
        assert parents_of("CACABA", abc_1d) == {"BBAA", "BBAB"}

    def test_parentless_pairs(self, abc_1d):
        assert parents_of("CC", abc_1d) == set()
        assert parents_of("AA", abc_1d) == set()

    def test_diagonal_pair_includes_straight_parent(self, abc_2d):
        got = parents_of("BB", abc_2d, Direction.SE)
        assert "AB" in got

    def test_diagonal_word_gets_bent_parent(self, abc_2d):
        # CBBC read down-diagonally can come from a 3 x 2 bent shape.
        got = parents_of("CBBC", abc_2d, Direction.SE)
        assert "A*/CB/*B" in got

    def test_requires_trimmed_input(self, abc_1d):
        with pytest.raises(ValueError):
            enumerate_parents(parse_pattern("A*"), abc_1d)

    def test_product_cap_is_enforced(self, abc_2d):
        with pytest.raises(ResourceLimitError):
            enumerate_parents(word_to_pattern("BB", Direction.SE), abc_2d,
                              product_cap=1)

    @settings(max_examples=40, deadline=None)
    @given(data=st.data())
    def test_outputs_trimmed_and_within_size_bound(self, data):
        rules = data.draw(rule_sets())
        word = data.draw(st.text(alphabet=rules.alphabet.letters,
                                 min_size=1, max_size=4))
        direction = data.draw(st.sampled_from(
            (Direction.E,) if rules.dimension == 1 else tuple(Direction)))
        child = word_to_pattern(word, direction)
        for parent in enumerate_parents(child, rules):
            assert is_trimmed(parent)
            assert parent.rows <= max_parent_len(child.rows, rules.b)
            assert parent.cols <= max_parent_len(child.cols, rules.b)


def _fills(pattern: Pattern, letters):
    holes = [i for i, ch in enumerate(pattern.cells) if ch == WILDCARD]
    chars = list(pattern.cells)
    for combo in itertools.product(letters, repeat=len(holes)):
        for i, ch in zip(holes, combo):
            chars[i] = ch
        yield Grid(pattern.rows, pattern.cols, "".join(chars), 1)


def _is_parent_by_definition(q: Pattern, p: Pattern, rules) -> bool:
    """Brute-force parenthood, restated from the definition: at some
    alignment, p's box spans q's whole box (no smaller box suffices),
    every q cell covering concrete p cells is a concrete letter whose
    block reproduces them, and every other q cell is a wildcard (no
    redundant constraint)."""
    rh, b = rules.rule_rows, rules.b
    cells = list(p.concrete_cells())
    for dr in range(rh):
        if (dr + p.rows + rh - 1) // rh != q.rows:
            continue
        for dc in range(b):
            if (dc + p.cols + b - 1) // b != q.cols:
                continue
            ok = True
            for pi in range(q.rows):
                for pj in range(q.cols):
                    covered = [(r, c, ch) for r, c, ch in cells
                               if (r + dr) // rh == pi and (c + dc) // b == pj]
                    cell = q.at(pi, pj)
                    if not covered:
                        if cell != WILDCARD:
                            ok = False
                    elif cell == WILDCARD:
                        ok = False
                    else:
                        block = rules.rules[cell]
                        if any(block[(r + dr) % rh][(c + dc) % b] != ch
                               for r, c, ch in covered):
                            ok = False
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                return True
    return False


def _all_trimmed_patterns(max_rows, max_cols, letters):
    symbols = tuple(letters) + (WILDCARD,)
    for rows in range(1, max_rows + 1):
        for cols in range(1, max_cols + 1):
            for combo in itertools.product(symbols, repeat=rows * cols):
                pat = Pattern(rows, cols, "".join(combo))
                if pat.concrete_count and is_trimmed(pat):
                    yield pat


class TestParentSoundnessCompleteness:
    """Exhaustive cross-check of the parent construction on tiny alphabets:
    the enumerated set must exactly equal the definitional set."""

    @settings(max_examples=20, deadline=None)
    @given(data=st.data())
    def test_exhaustive_1d(self, data):
        rules = data.draw(rule_sets(dims=(1,), max_n=3))
        word = data.draw(st.text(alphabet=rules.alphabet.letters,
                                 min_size=1, max_size=3))
        child = word_to_pattern(word, Direction.E)
        got = enumerate_parents(child, rules)
        brute = {
            q for q in _all_trimmed_patterns(
                max_parent_len(child.rows, rules.b),
                max_parent_len(child.cols, rules.b),
                rules.alphabet.letters)
            if _is_parent_by_definition(q, child, rules)
        }
        assert got == brute

    @settings(max_examples=10, deadline=None)
    @given(data=st.data())
    def test_exhaustive_2d_diagonal_pairs(self, data):
        rules = data.draw(rule_sets(dims=(2,), max_n=2))
        word = data.draw(st.text(alphabet=rules.alphabet.letters,
                                 min_size=2, max_size=2))
        child = word_to_pattern(word, Direction.SE)
        got = enumerate_parents(child, rules)
        brute = {
            q for q in _all_trimmed_patterns(2, 2, rules.alphabet.letters)
            if _is_parent_by_definition(q, child, rules)
        }
        assert got == brute

    @settings(max_examples=25, deadline=None)
    @given(data=st.data())
    def test_every_completion_of_a_parent_reproduces_the_child(self, data):
        rules = data.draw(rule_sets(max_n=3))
        word = data.draw(st.text(alphabet=rules.alphabet.letters,
                                 min_size=1, max_size=3))
        direction = data.draw(st.sampled_from(
            (Direction.E,) if rules.dimension == 1 else (Direction.E, Direction.SE)))
        child = word_to_pattern(word, direction)
        for parent in enumerate_parents(child, rules):
            for completion in _fills(parent, rules.alphabet.letters):
                assert occurrences(child, expand(completion, rules, 1))


class TestFirstAppearance:
    def test_cacaba_from_single_a(self, abc_1d):
        res = first_appearance("CACABA", Direction.E, Grid.from_text("A"), abc_1d)
        assert res.found and res.level == 6

    def test_diagonal_pair_found_on_three(self, abc_2d):
        res = first_appearance("BB", Direction.SE, Grid.from_text("A"), abc_2d)
        assert res.found and res.level == 3

    def test_diagonal_pair_never_appears(self, abc_2d):
        res = first_appearance("AA", Direction.SE, Grid.from_text("A"), abc_2d)
        assert not res.found and res.level is None

    def test_single_letter_worst_case(self, abc_1d):
        res = first_appearance("A", Direction.E, Grid.from_text("CCC"), abc_1d)
        assert res.level == 3

    def test_level_equals_chain_length_plus_one(self, abc_1d):
        res = first_appearance("CACABA", Direction.E, Grid.from_text("A"), abc_1d)
        assert res.level == len(res.offsets) + 1

    def test_word_in_start_grid_is_level_one(self, abc_1d):
        res = first_appearance("BA", Direction.E, Grid.from_text("ABAB"), abc_1d)
        assert res.level == 1 and res.anchor == (1, 2)
        assert res.offsets == ()

    def test_witness_tie_break_is_row_major(self, abc_1d):
        res = first_appearance("B", Direction.E, Grid.from_text("ABAB"), abc_1d)
        assert res.anchor == (1, 2)

    def test_never_appears_is_a_fixpoint_not_a_cap(self, abc_1d):
        res = first_appearance("CC", Direction.E, Grid.from_text("A"), abc_1d)
        assert not res.found
        assert res.stats.patterns_seen >= 1

    def test_depth_cap_raises_unresolved(self, abc_1d):
        with pytest.raises(UnresolvedSearchError) as err:
            first_appearance("CACABA", Direction.E, Grid.from_text("A"), abc_1d,
                             depth_cap=2)
        assert err.value.depth == 3
        assert err.value.patterns_seen > 0

    def test_depth_cap_still_finds_shallow_words(self, abc_1d):
        res = first_appearance("CAB", Direction.E, Grid.from_text("A"), abc_1d,
                               depth_cap=3)
        assert res.level == 4

    def test_deterministic_across_runs(self, abc_2d):
        runs = [
            first_appearance("BB", Direction.SE, Grid.from_text("A"), abc_2d)
            for _ in range(2)
        ]
        assert runs[0] == runs[1]

    def test_searcher_reuse_matches_fresh_runs(self, abc_1d):
        searcher = AncestrySearcher(abc_1d, Grid.from_text("A"))
        first = searcher.search("CACABA", Direction.E)
        fresh = first_appearance("CACABA", Direction.E, Grid.from_text("A"), abc_1d)
        assert (first.level, first.ancestor, first.anchor, first.offsets) == \
            (fresh.level, fresh.ancestor, fresh.anchor, fresh.offsets)

    def test_raw_pattern_search(self, abc_2d):
        searcher = AncestrySearcher(abc_2d, Grid.from_text("A"))
        res = searcher.search_pattern(parse_pattern("B*/*B"))
        assert res.direction is None
        assert res.level == 3
        assert res.level == searcher.search("BB", Direction.SE).level
        addrs = witness_coordinates(res, Grid.from_text("A"), abc_2d)
        assert len(addrs) == 2


class TestParentLevelShift:
    @settings(max_examples=30, deadline=None)
    @given(data=st.data())
    def test_some_parent_occurs_one_level_earlier(self, data):
        """If a word first appears on level k > 1 of a materialized run,
        one of its parents occurs on level k-1."""
        rules = data.draw(rule_sets(max_n=3))
        l1 = data.draw(grids_for(rules, max_side=3))
        word = data.draw(st.text(alphabet=rules.alphabet.letters,
                                 min_size=1, max_size=3))
        direction = data.draw(st.sampled_from(
            (Direction.E,) if rules.dimension == 1 else (Direction.E, Direction.SE)))
        target = word_to_pattern(word, direction)
        levels = [l1]
        for _ in range(5):
            levels.append(expand(levels[-1], rules, 1))
        first = next((k for k, g in enumerate(levels, start=1)
                      if occurrences(target, g)), None)
        if first is None or first == 1:
            return
        parents = enumerate_parents(target, rules)
        assert any(occurrences(p, levels[first - 2]) for p in parents)


class TestWitnessCoordinates:
    def test_level_one_witness_is_the_occurrence(self, abc_1d):
        res = first_appearance("BA", Direction.E, Grid.from_text("ABAB"), abc_1d)
        addrs = witness_coordinates(res, Grid.from_text("ABAB"), abc_1d)
        assert [(a.level, a.row, a.col) for a in addrs] == [(1, 1, 2), (1, 1, 3)]

    def test_cacaba_column_span(self, abc_1d):
        l1 = Grid.from_text("A")
        res = first_appearance("CACABA", Direction.E, l1, abc_1d)
        addrs = witness_coordinates(res, l1, abc_1d)
        cols = [a.col for a in addrs]
        assert all(a.level == 6 for a in addrs)
        assert all(1 <= c <= 32 for c in cols)
        level6 = expand(l1, abc_1d, 5)
        assert "".join(level6.letter(1, c) for c in cols) == "CACABA"

    def test_addresses_stay_inside_ancestor_block(self, abc_2d):
        l1 = Grid.from_text("A")
        res = first_appearance("BB", Direction.SE, l1, abc_2d)
        addrs = witness_coordinates(res, l1, abc_2d)
        (rlo, rhi), (clo, chi) = descendant_block_range((1, 1), res.level, abc_2d)
        for a in addrs:
            assert rlo <= a.row <= rhi and clo <= a.col <= chi

    def test_reversed_direction_spells_word_in_order(self, abc_1d):
        l1 = Grid.from_text("ABAB")
        res = first_appearance("AB", Direction.W, l1, abc_1d)
        addrs = witness_coordinates(res, l1, abc_1d)
        assert res.level == 1
        # The box anchors at column 2; the word itself reads right to left.
        assert [a.col for a in addrs] == [3, 2]

    def test_rejects_never_results(self, abc_1d):
        res = first_appearance("CC", Direction.E, Grid.from_text("A"), abc_1d)
        with pytest.raises(ValueError):
            witness_coordinates(res, Grid.from_text("A"), abc_1d)

    def test_oracle_disagreement_is_trapped(self, abc_1d):
        import dataclasses

        from fractalsearch import WitnessError

        l1 = Grid.from_text("ABAB")
        res = first_appearance("BA", Direction.E, l1, abc_1d)
        doctored = dataclasses.replace(res, anchor=(1, 1))
        with pytest.raises(WitnessError):
            witness_coordinates(doctored, l1, abc_1d)

    def test_inconsistent_chain_is_rejected_at_construction(self, abc_1d):
        import dataclasses

        from fractalsearch import WitnessError

        res = first_appearance("CAB", Direction.E, Grid.from_text("A"), abc_1d)
        with pytest.raises(WitnessError):
            dataclasses.replace(res, level=2)


class TestAncestorTree:
    def test_cacaba_tree_shape(self, abc_1d):
        tree = ancestor_tree("CACABA", Direction.E, abc_1d)
        assert tree.pattern.text() == "CACABA"
        assert [c.pattern.text() for c in tree.children] == ["BBAA", "BBAB"]
        bbaa, bbab = tree.children
        assert bbaa.status == "no-parents" and not bbaa.children
        assert [c.pattern.text() for c in bbab.children] == ["CA"]
        ca = bbab.children[0]
        assert sorted(c.pattern.text() for c in ca.children) == ["BA", "BB"]

    def test_cacaba_tree_depth_and_leaves(self, abc_1d):
        tree = ancestor_tree("CACABA", Direction.E, abc_1d)
        assert tree.max_depth() == 5
        leaves = sorted(leaf.pattern.text() for leaf in tree.leaves())
        assert leaves == ["A", "AA", "B", "B", "BBAA", "BC", "CC"]

    def test_unproducible_letter_gives_root_only_tree(self):
        rules = RuleSet(Alphabet.from_string("AB"), 1, 2,
                        {"A": ("BB",), "B": ("BB",)})
        tree = ancestor_tree("A", Direction.E, rules)
        assert tree.status == "no-parents" and not tree.children

    def test_grounded_status_with_start_grid(self, abc_1d):
        tree = ancestor_tree("CACABA", Direction.E, abc_1d, Grid.from_text("A"))
        grounded = [n for n in _walk(tree) if n.status == "grounded"]
        assert grounded and all(n.pattern.text() == "A" for n in grounded)

    def test_json_export_round_trips_structure(self, abc_1d):
        tree = ancestor_tree("CAB", Direction.E, abc_1d)
        data = json.loads(tree_to_json(tree))
        assert data["pattern"] == "CAB"
        assert data["children"][0]["pattern"] == "BA"
        assert {"pattern", "depth", "status", "children"} <= set(data)

    def test_dot_export_mentions_every_pattern(self, abc_1d):
        tree = ancestor_tree("CAB", Direction.E, abc_1d)
        dot = tree_to_dot(tree)
        assert dot.startswith("digraph")
        for node in _walk(tree):
            assert f'label="{node.pattern.text()}"' in dot


def _walk(node):
    yield node
    for child in node.children:
        yield from _walk(child)
