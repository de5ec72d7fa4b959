"""Command-line entry point.

Subcommands: expand | contract | search | bounds | oracle | solve | tree.
Exit codes: 0 success, 1 domain error (bad input, never-appears under
--expect-found), 2 resource-cap error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import bounds as bounds_mod
from .ancestry import (
    DEFAULT_PRODUCT_CAP,
    AncestrySearcher,
    ancestor_tree,
    tree_to_dot,
    tree_to_json,
    witness_coordinates,
)
from .core import Grid, expand as expand_grid, contract as contract_grid
from .errors import FractalSearchError, ResourceLimitError, UnresolvedSearchError
from .files import grid_argument, load_rules
from .oracle import DEFAULT_CELL_CAP, run_agreement, sweep_max_latest
from .patterns import Direction, parse_pattern, trim
from .puzzle import (
    load_puzzle,
    report_to_json_dict,
    report_to_text,
    solve as solve_puzzle,
)

USAGE_EXIT = 64


@dataclass
class RunConfig:
    """Validated invocation settings shared by the subcommands."""

    subcommand: str
    paths: list[str] = field(default_factory=list)
    directions: list[Direction] = field(default_factory=list)
    depth_cap: int | None = None
    product_cap: int = DEFAULT_PRODUCT_CAP
    cell_cap: int = DEFAULT_CELL_CAP
    output_format: str = "text"
    jobs: int = 1
    seed: int = 2013

    def __post_init__(self):
        for cap in (self.product_cap, self.cell_cap, self.jobs):
            if cap is not None and cap < 1:
                raise ValueError("caps and job counts must be positive")
        if self.depth_cap is not None and self.depth_cap < 0:
            raise ValueError("depth cap must be >= 0")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _add_common(sp, *, rules=True, l1=False, grid=False, fmt=("text", "json")):
    if rules:
        sp.add_argument("--rules", required=True, help="rules file")
    if l1:
        sp.add_argument("--l1", required=True,
                        help="level-1 grid, inline (A or AB/CB) or a grid file")
    if grid:
        sp.add_argument("--grid", required=True,
                        help="grid, inline rows or a grid file")
    sp.add_argument("--format", choices=fmt, default=fmt[0])
    sp.add_argument("--product-cap", type=int, default=DEFAULT_PRODUCT_CAP)


def build_parser() -> _Parser:
    parser = _Parser(prog="fractalsearch",
                     description="Fractal word search engine")
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=_Parser)

    sp = sub.add_parser("expand", help="apply replacement steps to a grid")
    _add_common(sp, grid=True)
    sp.add_argument("--steps", type=int, default=1)

    sp = sub.add_parser("contract", help="invert replacement steps")
    _add_common(sp, grid=True)
    sp.add_argument("--steps", type=int, default=1)
    sp.add_argument("--level", type=int, default=None,
                    help="level tag of the input grid (default: steps + 1)")

    sp = sub.add_parser("search", help="earliest level of a word or pattern")
    _add_common(sp, l1=True)
    sp.add_argument("--word", default=None)
    sp.add_argument("--direction", default="E",
                    choices=[d.name for d in Direction])
    sp.add_argument("--pattern", default=None,
                    help="letter/wildcard pattern like C**/*A*/**T "
                         "(alternative to --word)")
    sp.add_argument("--depth-cap", type=int, default=None)
    sp.add_argument("--expect-found", action="store_true",
                    help="exit 1 when the word can never appear")

    sp = sub.add_parser("bounds", help="first-appearance bound table")
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--len", type=int, default=None, dest="length")
    sp.add_argument("--len-min", type=int, default=1)
    sp.add_argument("--len-max", type=int, default=None)
    sp.add_argument("--format", choices=("text", "csv", "json"), default="text")

    sp = sub.add_parser("oracle", help="brute-force experiments")
    osub = sp.add_subparsers(dest="oracle_command", required=True,
                             parser_class=_Parser)
    ssp = osub.add_parser("sweep", help="exhaustive rule-set sweep")
    ssp.add_argument("--n", type=int, required=True)
    ssp.add_argument("--b", type=int, default=2)
    ssp.add_argument("--dim", type=int, default=1, choices=(1, 2))
    ssp.add_argument("--len-cap", type=int, default=2)
    ssp.add_argument("--jobs", type=int, default=1)
    ssp.add_argument("--format", choices=("text", "json", "csv"), default="text")
    asp = osub.add_parser("agree", help="randomized backward/forward audit")
    asp.add_argument("--instances", type=int, default=1000)
    asp.add_argument("--seed", type=int, default=2013)
    asp.add_argument("--max-level", type=int, default=10)
    asp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("solve", help="solve a puzzle file end to end")
    sp.add_argument("puzzle", help="puzzle file")
    sp.add_argument("--json", action="store_true", help="shortcut for --format json")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--cross-all", action="store_true",
                    help="cross out every grounding at each word's earliest level")
    sp.add_argument("--tree-dir", default=None,
                    help="write per-word ancestor trees (json + dot) here")
    sp.add_argument("--jobs", type=int, default=1,
                    help="worker processes for per-word searches")
    sp.add_argument("--product-cap", type=int, default=DEFAULT_PRODUCT_CAP)

    sp = sub.add_parser("tree", help="export a word's ancestor tree")
    _add_common(sp, fmt=("text", "json", "dot"))
    sp.add_argument("--word", required=True)
    sp.add_argument("--direction", default="E",
                    choices=[d.name for d in Direction])
    sp.add_argument("--l1", default=None,
                    help="optional level-1 grid for grounded leaves")

    return parser


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _print_grid(grid: Grid, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps({"rows": grid.rows, "cols": grid.cols,
                          "level": grid.level, "lines": list(grid.lines())}))
    else:
        for line in grid.lines():
            print(line)


def _cmd_expand(args) -> int:
    rules = load_rules(args.rules)
    grid = grid_argument(args.grid)
    _print_grid(expand_grid(grid, rules, args.steps), args.format)
    return 0


def _cmd_contract(args) -> int:
    rules = load_rules(args.rules)
    grid = grid_argument(args.grid)
    if grid.level == 1:
        level = args.level if args.level is not None else args.steps + 1
        grid = Grid(grid.rows, grid.cols, grid.cells, level)
    for _ in range(args.steps):
        grid = contract_grid(grid, rules)
    _print_grid(grid, args.format)
    return 0


def _cmd_search(args) -> int:
    if (args.word is None) == (args.pattern is None):
        print("search: exactly one of --word / --pattern is required",
              file=sys.stderr)
        return USAGE_EXIT
    rules = load_rules(args.rules)
    l1 = grid_argument(args.l1)
    searcher = AncestrySearcher(rules, l1, product_cap=args.product_cap)
    if args.pattern is not None:
        result = searcher.search_pattern(trim(parse_pattern(args.pattern)),
                                         depth_cap=args.depth_cap)
    else:
        result = searcher.search(args.word, Direction[args.direction],
                                 depth_cap=args.depth_cap)
    if args.format == "json":
        payload = {
            "word": result.word,
            "direction": result.direction.name if result.direction else None,
            "found": result.found,
            "level": result.level,
            "nodes_expanded": result.stats.nodes_expanded,
            "patterns_seen": result.stats.patterns_seen,
        }
        if result.found:
            payload["ancestor"] = result.ancestor.text()
            payload["anchor"] = list(result.anchor)
            payload["addresses"] = [
                [a.level, a.row, a.col]
                for a in witness_coordinates(result, l1, rules)
            ]
        else:
            payload["fixpoint_depth"] = result.max_depth
        print(json.dumps(payload))
    elif result.found:
        print(f"level {result.level}")
    else:
        print(f"never appears (fixpoint at depth {result.max_depth})")
    return 1 if (args.expect_found and not result.found) else 0


def _cmd_bounds(args) -> int:
    if args.length is not None:
        lengths = [args.length]
    else:
        lengths = list(range(args.len_min, (args.len_max or args.len_min) + 1))
    rows = [
        {"len": ln, "w1": bounds_mod.w1(args.b, args.n, ln),
         "w2": bounds_mod.w2(args.b, args.n, ln),
         "max_parent_len": bounds_mod.max_parent_len(ln, args.b)}
        for ln in lengths
    ]
    if args.format == "json":
        print(json.dumps({"b": args.b, "n": args.n, "rows": rows}))
    elif args.format == "csv":
        print("len,w1,w2,max_parent_len")
        for row in rows:
            print(f"{row['len']},{row['w1']},{row['w2']},{row['max_parent_len']}")
    elif len(rows) == 1:
        print(f"w1={rows[0]['w1']}, w2={rows[0]['w2']}")
    else:
        print(f"{'len':>5} {'w1':>8} {'w2':>10} {'max_parent':>10}")
        for row in rows:
            print(f"{row['len']:>5} {row['w1']:>8} {row['w2']:>10} "
                  f"{row['max_parent_len']:>10}")
    return 0


def _cmd_oracle(args) -> int:
    if args.oracle_command == "sweep":
        report = sweep_max_latest(args.n, args.b, args.dim, args.len_cap,
                                  jobs=args.jobs)
        if args.format == "json":
            print(json.dumps(report.to_json_dict()))
        elif args.format == "csv":
            print("ruleset_index,max_level")
            for idx, level in enumerate(report.per_ruleset_max):
                print(f"{idx},{level}")
        else:
            print(f"rule sets: {report.ruleset_count}")
            print(f"global max latest first appearance: {report.global_max}")
            for length, level in report.per_length_max.items():
                print(f"  word length {length}: {level}")
            print(f"witness: word {report.witness_word} with start grid "
                  f"{report.witness_l1} under {report.witness_rules}")
        return 0
    report = run_agreement(args.instances, args.seed, max_level=args.max_level)
    if args.format == "json":
        print(json.dumps(report.to_json_dict()))
    else:
        print(f"instances: {report.instances}  found: {report.found_both}  "
              f"never: {report.never_both}  beyond horizon: {report.beyond_horizon}")
        for name in ("mismatches", "bound_violations",
                     "geometry_violations", "confinement_violations"):
            items = getattr(report, name)
            print(f"{name}: {len(items)}")
            for item in items[:5]:
                print(f"  {item}")
    return 0 if report.clean else 1


def _cmd_solve(args) -> int:
    spec = load_puzzle(args.puzzle)
    report = solve_puzzle(spec, cross_all=args.cross_all, jobs=args.jobs)
    fmt = "json" if args.json else args.format
    if fmt == "json":
        print(json.dumps(report_to_json_dict(report)))
    else:
        print(report_to_text(report))
    if args.tree_dir:
        os.makedirs(args.tree_dir, exist_ok=True)
        for placement in report.placements:
            tree = ancestor_tree(placement.word, placement.direction,
                                 spec.rules, spec.l1)
            base = os.path.join(args.tree_dir, placement.word)
            with open(base + ".json", "w", encoding="utf-8") as fh:
                fh.write(tree_to_json(tree))
            with open(base + ".dot", "w", encoding="utf-8") as fh:
                fh.write(tree_to_dot(tree))
    return 0


def _render_tree_text(node, indent: int = 0) -> list[str]:
    suffix = "" if node.status == "interior" else f"  [{node.status}]"
    lines = ["  " * indent + node.pattern.text() + suffix]
    for child in node.children:
        lines.extend(_render_tree_text(child, indent + 1))
    return lines


def _cmd_tree(args) -> int:
    rules = load_rules(args.rules)
    l1 = grid_argument(args.l1) if args.l1 else None
    tree = ancestor_tree(args.word, Direction[args.direction], rules, l1,
                         product_cap=args.product_cap)
    if args.format == "json":
        print(tree_to_json(tree))
    elif args.format == "dot":
        print(tree_to_dot(tree))
    else:
        print("\n".join(_render_tree_text(tree)))
    return 0


_COMMANDS = {
    "expand": _cmd_expand,
    "contract": _cmd_contract,
    "search": _cmd_search,
    "bounds": _cmd_bounds,
    "oracle": _cmd_oracle,
    "solve": _cmd_solve,
    "tree": _cmd_tree,
}


def _config_from_args(args) -> RunConfig:
    paths = [p for p in (getattr(args, "rules", None),
                         getattr(args, "puzzle", None)) if p]
    directions = []
    if getattr(args, "direction", None):
        directions = [Direction[args.direction]]
    return RunConfig(
        subcommand=args.subcommand,
        paths=paths,
        directions=directions,
        depth_cap=getattr(args, "depth_cap", None),
        product_cap=getattr(args, "product_cap", DEFAULT_PRODUCT_CAP),
        output_format=("json" if getattr(args, "json", False)
                       else getattr(args, "format", "text")),
        jobs=getattr(args, "jobs", 1),
        seed=getattr(args, "seed", 2013),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _config_from_args(args)
    except ValueError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    try:
        return _COMMANDS[args.subcommand](args)
    except (ResourceLimitError, UnresolvedSearchError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2
    except FractalSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
