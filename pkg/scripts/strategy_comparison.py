#!/usr/bin/env python3
"""Reproduce the qualitative strategy comparison at desk scale.

Runs all four shipping strategies over the same order book and prints the
Yes/No judgment table plus the per-strategy operational counters. The alias
roster is restricted to two carriers here so the "works with all carriers"
row actually discriminates; pass --all-carriers to lift that restriction.
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from postalias.sim import (
    ScenarioConfig,
    comparison_table,
    report_summary,
    run_all_strategies,
)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--customers", type=int, default=50)
    parser.add_argument("--merchants", type=int, default=10)
    parser.add_argument("--orders", type=int, default=500)
    parser.add_argument("--all-carriers", action="store_true",
                        help="Assume every carrier offers aliasing.")
    parser.add_argument("--out", type=Path, default=None,
                        help="Also write the reports as JSON.")
    args = parser.parse_args(argv)

    config = ScenarioConfig(
        seed=args.seed,
        customers=args.customers,
        merchants=args.merchants,
        orders=args.orders,
        aliasing_carriers=() if args.all_carriers else ("USPS", "UPS"),
    )
    reports = run_all_strategies(config)

    print(comparison_table(reports))
    for name, report in reports.items():
        print(f"\n[{name}]")
        print(report_summary(report))

    if args.out is not None:
        payload = {name: r.to_record() for name, r in reports.items()}
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                            encoding="utf-8")
        print(f"\nreports written to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
