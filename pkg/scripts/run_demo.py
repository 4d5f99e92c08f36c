#!/usr/bin/env python3
"""End-to-end demo on the bundled fixture: fit, score the five stock
policies, and print the ranking with paired deltas against do-nothing."""

import argparse

from idss import (
    apply_transforms,
    builtin_policies,
    compare,
    default_params,
    evaluate_policies,
    fit_network,
)
from idss.data import bundled_data_path, bundled_network_path
from idss.catalog import load_table
from idss.service.document import load_document


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-n", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    parsed = load_document(bundled_network_path())
    table = apply_transforms(load_table(bundled_data_path(), parsed.catalog), parsed.catalog)
    fitted = fit_network(parsed.spec, table)
    print(f"fitted {len(fitted.fits)} nodes over {table.years[0]}-{table.years[-1]}")

    report = evaluate_policies(
        fitted, builtin_policies(), default_params(), n_samples=args.n, seed=args.seed
    )
    deltas = {d.policy: d for d in compare(report, "P1")}
    print(f"\n{'rank':>4}  {'policy':<6} {'EU':>10} {'MC se':>9} {'dEU vs P1':>10} {'paired se':>10}")
    for i, name in enumerate(report.ranking, start=1):
        res = report.results[name]
        d = deltas[name]
        print(
            f"{i:>4}  {name:<6} {res.expected_utility:>10.4f} {res.mc_se:>9.5f} "
            f"{d.delta_eu:>+10.4f} {d.paired_se:>10.5f}"
        )
    print("\nlower expected utility = better (less malnutrition / disadvantage)")


if __name__ == "__main__":
    main()
