#!/usr/bin/env python3
"""Regenerate the bundled synthetic yearly dataset (src/idss/data/)."""

import argparse
from pathlib import Path

from idss.catalog import write_table
from idss.defaults import SYNTHETIC_SEED, synthetic_table


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=SYNTHETIC_SEED)
    parser.add_argument(
        "-o",
        "--out",
        default=str(Path(__file__).resolve().parents[1] / "src/idss/data/synthetic_uk_food.csv"),
    )
    args = parser.parse_args()
    table = synthetic_table(seed=args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_table(table, out)
    print(f"wrote {out} ({table.n_years} years x {len(table.columns)} variables)")


if __name__ == "__main__":
    main()
