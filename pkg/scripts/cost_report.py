#!/usr/bin/env python3
"""Print the cost and capacity arithmetic behind carrier-side aliasing.

Covers per-label relabeling cost at national volume, the one-off cost of
training the sorting workforce, and namespace headroom per ZIP.
"""

import argparse
import sys

from postalias.codec import NamespaceConfig
from postalias.costs import (
    TOTAL_US_PACKAGES_2024,
    CostModel,
    capacity_check,
    carrier_volumes,
    training_cost,
)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--label-cost", type=float, default=0.05,
                        help="Cost to print one relabel, dollars.")
    parser.add_argument("--employees", type=int, default=121_000)
    parser.add_argument("--minutes", type=int, default=15,
                        help="Training minutes per employee.")
    parser.add_argument("--wage", type=float, default=20.0,
                        help="Hourly wage, dollars.")
    args = parser.parse_args(argv)

    print("2024 parcel volume by carrier")
    volumes = carrier_volumes()
    for carrier, volume in volumes.items():
        print(f"  {carrier:<18} {volume:>14,}")
    total = sum(volumes.values())
    print(f"  {'total':<18} {total:>14,}")
    assert total == TOTAL_US_PACKAGES_2024

    model = CostModel(label_unit_cost=args.label_cost)
    print(f"\nrelabeling every package at ${model.label_unit_cost:.2f}/label: "
          f"${model.label_unit_cost * total:,.0f}/year")

    cost = training_cost(args.employees, args.minutes, args.wage)
    print(f"training {args.employees:,} sorters for {args.minutes} min "
          f"at ${args.wage:.0f}/h: ${cost:,.0f} one-off")

    ns = NamespaceConfig()
    headroom = capacity_check(total)
    print(f"\nnamespace: {ns.capacity_per_zip_year:.0e} fresh aliases per ZIP "
          f"per year, {ns.address_space_per_zip:.0e} identities per ZIP")
    print(f"one ZIP's yearly namespace covers {headroom:,.0f}x the entire "
          f"national parcel volume")
    return 0


if __name__ == "__main__":
    sys.exit(main())
