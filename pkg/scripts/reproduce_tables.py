"""Rebuild all ten tables, write CSV and JSON, and compare with the fixtures.

    python3 scripts/reproduce_tables.py --out results --samples 100000 --seed 2024
"""

import argparse
from pathlib import Path

from mixpension.cli import RunConfig
from mixpension.tables import BUILDERS, compare_table, emit, fixture_path, load_fixture, run_table

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--fixtures", type=Path, default=ROOT / "fixtures")
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    config = RunConfig(samples=args.samples, seed=args.seed)
    failing = 0
    for tid in BUILDERS:
        art = run_table(tid, config)
        emit(art, "csv", args.out / f"table_{tid:02d}.csv")
        emit(art, "json", args.out / f"table_{tid:02d}.json")
        checks = compare_table(art, load_fixture(fixture_path(args.fixtures, tid)))
        bad = [c for c in checks if not c.passed]
        failing += len(bad)
        print(f"table {tid:2d}: {len(checks) - len(bad)}/{len(checks)} cells match  ({art.title})")
        for c in bad:
            print("   ", c.line())
    print(f"{failing} cell(s) differ from the published values; outputs in {args.out}")


if __name__ == "__main__":
    main()
