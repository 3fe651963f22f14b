#!/usr/bin/env python3
"""Walk one alias through its whole life, printing each hop.

Issue -> merchant checkout validation -> parcel intake and relabel ->
per-viewer tracking -> expiry -> refused junk mail with attribution.
Everything runs in-process against a temporary data directory.
"""

import sys
import tempfile
from datetime import datetime, timedelta, timezone
from pathlib import Path

from postalias.codec import AliasAddressTemplate
from postalias.postal import normalize
from postalias.registry import AliasRegistry
from postalias.relay import RelayEngine, ViewerRole
from postalias.validation import ValidationGateway, ValidationMode


def banner(text: str) -> None:
    print(f"\n=== {text} ===")


def main() -> int:
    t0 = datetime(2025, 6, 1, 12, 0, tzinfo=timezone.utc)
    customer = normalize("John Smith", "123 Main Street", "Unit 456",
                         "Any Town", "NY", "12345")

    with tempfile.TemporaryDirectory() as tmp:
        registry = AliasRegistry.replay(
            Path(tmp) / "events.jsonl", AliasAddressTemplate(), rng=42
        )
        engine = RelayEngine(registry)

        banner("1. carrier issues an alias for shop.example")
        record = registry.issue(customer, merchant_domain="shop.example",
                                validity_days=30, now=t0)
        print(record.alias_address.display())
        print(f"short code {record.short_code}, valid 30 days after first use")

        banner("2. merchant checkout validates the alias address")
        gateway = ValidationGateway([customer], registry=registry,
                                    template=registry.template)
        decision = gateway.checkout_gate(record.alias_address,
                                         ValidationMode.HARD, t0)
        print(f"hard validation says: {decision.value}")

        banner("3. merchant hands the labeled parcel to the carrier")
        parcel = engine.create_parcel("PKG-1", "shop.example",
                                      record.alias_address, t0 + timedelta(days=1))
        engine.intake(parcel, t0 + timedelta(days=1))
        print(f"carrier relabeled to: {parcel.label.display()}")
        print(f"relabel carries short code {parcel.relabel_history[-1].short_code}")

        engine.dispatch(parcel, t0 + timedelta(days=2))
        engine.deliver(parcel, t0 + timedelta(days=3))

        banner("4. what each party sees in tracking")
        for role in ViewerRole:
            view = engine.tracking_view(parcel, role)
            print(f"\n-- {role.value} --")
            print("to: " + ", ".join(view.destination.display().splitlines()))
            if view.short_code:
                print(f"short code: {view.short_code}")
            for event in view.events:
                print(f"  {event.time:%m-%d %H:%M}  {event.kind.value:<14} {event.location}")

        banner("5. sixty days later the alias has lapsed")
        later = t0 + timedelta(days=61)
        registry.sweep_expiry(later)
        print(f"alias status: {registry.get(record.digits).status.value}")

        banner("6. junk mail to the dead alias is refused and attributed")
        junk = engine.create_parcel("AD-1", "mail-blast.example",
                                    record.alias_address, later)
        engine.intake(junk, later)
        print(f"parcel state: {junk.state.value}")
        leak = engine.attributions[-1]
        print(f"alias was issued to {leak.merchant_domain!r}; "
              f"sender {leak.sender!r} got it {leak.reason.value}")
        engine.return_to_merchant(junk, later + timedelta(days=1))
        print(f"returned under label: {junk.label.display()}")

        registry.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
