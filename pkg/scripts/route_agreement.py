#!/usr/bin/env python3
"""Randomized audit: the backward parent-enumeration search and the
forward materialize-and-scan search must report identical first-appearance
levels on random instances, and every run must respect the closed-form
bounds, the parent-size bound, and diagonal confinement.

Usage: python scripts/route_agreement.py [--instances 1000] [--seed 2013]
"""

import argparse
import json
import sys
import time

from fractalsearch import run_agreement


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=2013)
    parser.add_argument("--max-level", type=int, default=10)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    started = time.monotonic()
    report = run_agreement(args.instances, args.seed, max_level=args.max_level)
    elapsed = time.monotonic() - started
    if args.json:
        print(json.dumps(report.to_json_dict()))
    else:
        print(f"instances: {report.instances} ({elapsed:.1f}s)")
        print(f"  found on both routes:   {report.found_both}")
        print(f"  never on both routes:   {report.never_both}")
        print(f"  beyond forward horizon: {report.beyond_horizon}")
        for name in ("mismatches", "bound_violations", "geometry_violations",
                     "confinement_violations"):
            items = getattr(report, name)
            print(f"  {name}: {len(items)}")
            for item in items[:10]:
                print(f"    {item}")
    return 0 if report.clean else 1


if __name__ == "__main__":
    sys.exit(main())
