"""Deterministic scenario engine comparing address-privacy strategies.

One run simulates a population of customers ordering from merchants under a
single strategy (true address, PO box, virtual mailbox, or aliasing), pushes
every parcel through the real validation gateway and relay engine, then lets
merchants send unsolicited mail to every address they saw. The report carries
the delivery, blocking, linkability, forwarding, and cost numbers that the
strategy comparison table is built from.

Everything is driven by one seeded RNG; identical config and seed produce a
byte-identical report.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, fields, replace
from datetime import datetime, timedelta, timezone
from enum import Enum

from .codec import AliasAddressTemplate
from .costs import carrier_volumes
from .postal import PostalAddress, address_key, normalize
from .registry import AliasRegistry
from .relay import ParcelState, RelayEngine, ViewerRole
from .validation import GateDecision, ValidationGateway, ValidationMode

SIM_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

USPS = "USPS"


class Strategy(Enum):
    TRUE_ADDRESS = "TrueAddress"
    PO_BOX = "POBox"
    VIRTUAL_MAILBOX = "VirtualMailbox"
    ALIASING = "Aliasing"


class LogisticsModel(Enum):
    IN_HOUSE = "InHouse"
    THIRD_PARTY = "ThirdParty"
    DROPSHIP = "Dropship"


_PLACES = [
    ("Any Town", "NY", "12345"),
    ("Springfield", "IL", "62704"),
    ("Fairview", "TX", "75069"),
    ("Greenville", "SC", "29601"),
    ("Madison", "WI", "53703"),
]

_STREETS = ["Main Street", "Oak Avenue", "Cedar Lane", "Maple Drive", "Elm Court"]


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """Knobs for one simulated scenario."""

    strategy: Strategy = Strategy.ALIASING
    seed: int = 42
    customers: int = 50
    merchants: int = 10
    orders: int = 500
    # Chance a merchant mails ads to every address it has seen.
    unsolicited_probability: float = 0.5
    # Days between the orders and the ad mailing; the default sits past the
    # alias validity window so expired aliases bounce the ads.
    unsolicited_delay_days: int = 60
    hard_validation_fraction: float = 0.5
    # (in-house, third-party, dropship) weights.
    logistics_mix: tuple[float, float, float] = (0.5, 0.3, 0.2)
    # Carriers whose customers can use aliasing. Empty tuple means all.
    aliasing_carriers: tuple[str, ...] = ()
    # Whether merchants validate against the carrier's alias-aware API.
    carrier_validation_available: bool = True
    validity_days: int = 30
    label_unit_cost: float = 0.05
    alias_fee: float = 0.0
    po_box_annual_fee: float = 120.0
    virtual_mailbox_monthly_fee: float = 15.0
    forwarding_fee: float = 5.0
    # Storage slots at the box/mailbox. Recorded in the report; deliveries are
    # not failed on overflow.
    po_box_capacity: int = 10
    virtual_mailbox_capacity: int = 30

    @classmethod
    def from_mapping(cls, data: dict) -> "ScenarioConfig":
        kwargs: dict = {}
        valid = {f.name for f in fields(cls)}
        for key, raw in data.items():
            if key not in valid:
                raise ValueError(f"unknown scenario config key: {key!r}")
            kwargs[key] = _coerce(key, raw)
        return cls(**kwargs)

    def to_record(self) -> dict:
        rec = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Enum):
                value = value.value
            elif isinstance(value, tuple):
                value = list(value)
            rec[f.name] = value
        return rec


def _coerce(key: str, raw):
    """Parse a raw config-file string into the field's type."""
    if not isinstance(raw, str):
        return raw
    if key == "strategy":
        return Strategy(raw)
    if key == "logistics_mix":
        parts = [float(p) for p in raw.split(",")]
        if len(parts) != 3:
            raise ValueError("logistics_mix needs three comma-separated weights")
        return tuple(parts)
    if key == "aliasing_carriers":
        return tuple(p.strip() for p in raw.split(",") if p.strip())
    if key == "carrier_validation_available":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if key in ("seed", "customers", "merchants", "orders", "unsolicited_delay_days",
               "validity_days", "po_box_capacity", "virtual_mailbox_capacity"):
        return int(raw)
    return float(raw)


@dataclass(slots=True)
class ScenarioReport:
    """Metrics from one scenario run. Counts partition their totals."""

    strategy: str
    seed: int
    orders_requested: int
    orders_declined: int  # aliasing unavailable for the merchant's carrier
    checkout_blocked: int
    checkout_warnings: int
    parcels_shipped: int
    parcels_non_usps: int
    deliveries_succeeded: int
    deliveries_failed: int
    home_deliveries: int
    relabels: int
    forwarding_actions_required: int
    unsolicited_attempts: int
    unsolicited_delivered: int
    unsolicited_blocked: int
    attribution_hits: int
    linkability: int
    cost_total: float
    storage_capacity: int | None
    leak_artifacts_scanned: int
    leak_hits: int

    def to_record(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


@dataclass(slots=True)
class _Customer:
    index: int
    home: PostalAddress
    po_box: PostalAddress
    virtual_mailbox: PostalAddress


@dataclass(slots=True)
class _Merchant:
    domain: str
    carrier: str
    mode: ValidationMode
    logistics: LogisticsModel
    sends_ads: bool
    seen: dict[str, PostalAddress] = field(default_factory=dict)


def _build_customers(config: ScenarioConfig) -> list[_Customer]:
    customers = []
    for i in range(config.customers):
        city, state, zip_code = _PLACES[i % len(_PLACES)]
        street = _STREETS[i % len(_STREETS)]
        home = normalize(
            f"Customer {i:03d}",
            f"{100 + i} {street}",
            f"Apt {i}" if i % 3 == 0 else None,
            city,
            state,
            zip_code,
        )
        po_box = normalize(f"Customer {i:03d}", f"PO Box {4100 + i}", None, city, state, zip_code)
        vmb = normalize(
            f"Customer {i:03d}", "250 Mailpoint Plaza", f"Ste {300 + i}", city, state, zip_code
        )
        customers.append(_Customer(i, home, po_box, vmb))
    return customers


def _build_merchants(config: ScenarioConfig, rng: random.Random) -> list[_Merchant]:
    volumes = carrier_volumes()
    carriers = list(volumes.keys())
    weights = [volumes[c] for c in carriers]
    merchants = []
    for j in range(config.merchants):
        merchants.append(
            _Merchant(
                domain=f"shop{j:02d}.example",
                carrier=rng.choices(carriers, weights=weights)[0],
                mode=(
                    ValidationMode.HARD
                    if rng.random() < config.hard_validation_fraction
                    else ValidationMode.SOFT
                ),
                logistics=rng.choices(list(LogisticsModel), weights=config.logistics_mix)[0],
                sends_ads=rng.random() < config.unsolicited_probability,
            )
        )
    return merchants


def linkability(per_merchant_keys: list[list[str]]) -> int:
    """Cross-merchant record joins, by exhaustive pairwise comparison."""
    count = 0
    for i in range(len(per_merchant_keys)):
        for j in range(i + 1, len(per_merchant_keys)):
            for a in per_merchant_keys[i]:
                for b in per_merchant_keys[j]:
                    if a == b:
                        count += 1
    return count


class _LeakScanner:
    """Collects merchant-visible text and scans it for true street lines."""

    def __init__(self) -> None:
        self.artifacts: list[str] = []
        self.alias_true_lines: set[str] = set()

    def see(self, text: str) -> None:
        self.artifacts.append(text.casefold())

    def see_address(self, kind: str, addr: PostalAddress) -> None:
        self.see(f"{kind}: {addr.display()}")

    def protect(self, true_address: PostalAddress) -> None:
        self.alias_true_lines.add(true_address.line1.casefold())

    def hits(self) -> int:
        return sum(
            1
            for artifact in self.artifacts
            for line in self.alias_true_lines
            if line in artifact
        )


def run_scenario(config: ScenarioConfig) -> ScenarioReport:
    """Run one strategy end to end and report the comparison metrics."""
    rng = random.Random(config.seed)
    customers = _build_customers(config)
    merchants = _build_merchants(config, rng)
    aliasing_carriers = set(config.aliasing_carriers) or set(carrier_volumes().keys())

    registry = AliasRegistry(
        AliasAddressTemplate(),
        default_validity_days=config.validity_days,
        rng=random.Random(rng.randrange(2**63)),
    )
    engine = RelayEngine(registry)
    official: list[PostalAddress] = []
    for c in customers:
        official.extend((c.home, c.po_box, c.virtual_mailbox))
    gateway = ValidationGateway(
        official,
        registry=registry if config.carrier_validation_available else None,
        template=registry.template,
    )

    scanner = _LeakScanner()
    report = ScenarioReport(
        strategy=config.strategy.value,
        seed=config.seed,
        orders_requested=config.orders,
        orders_declined=0,
        checkout_blocked=0,
        checkout_warnings=0,
        parcels_shipped=0,
        parcels_non_usps=0,
        deliveries_succeeded=0,
        deliveries_failed=0,
        home_deliveries=0,
        relabels=0,
        forwarding_actions_required=0,
        unsolicited_attempts=0,
        unsolicited_delivered=0,
        unsolicited_blocked=0,
        attribution_hits=0,
        linkability=0,
        cost_total=0.0,
        storage_capacity=_storage_capacity(config),
        leak_artifacts_scanned=0,
        leak_hits=0,
    )

    strategy = config.strategy
    for i in range(config.orders):
        customer = customers[rng.randrange(len(customers))]
        merchant = merchants[rng.randrange(len(merchants))]
        order_time = SIM_EPOCH + timedelta(minutes=i)

        alias_used = False
        if strategy is Strategy.TRUE_ADDRESS:
            ship_addr = customer.home
        elif strategy is Strategy.PO_BOX:
            ship_addr = customer.po_box
        elif strategy is Strategy.VIRTUAL_MAILBOX:
            ship_addr = customer.virtual_mailbox
        else:
            if merchant.carrier not in aliasing_carriers:
                # The customer checks the carrier before buying; no aliasing,
                # no order.
                report.orders_declined += 1
                continue
            record = registry.issue(
                customer.home,
                merchant_domain=merchant.domain,
                validity_days=config.validity_days,
                now=order_time,
            )
            ship_addr = record.alias_address
            alias_used = True
            report.cost_total += config.alias_fee
            scanner.protect(customer.home)

        gate = gateway.checkout_gate(ship_addr, merchant.mode, now=order_time)
        verdict = gateway.validate(ship_addr, now=order_time)
        # The merchant sees the entered address and the validation verdict.
        scanner.see_address(f"checkout {merchant.domain}", ship_addr)
        scanner.see(
            f"validation response {merchant.domain}: "
            + json.dumps({"result": verdict.value})
        )
        if gate is GateDecision.BLOCKED:
            report.checkout_blocked += 1
            continue
        if gate is GateDecision.PROCEED_WITH_WARNING:
            report.checkout_warnings += 1

        merchant.seen[address_key(ship_addr)] = ship_addr
        parcel = engine.create_parcel(f"P{i:06d}", merchant.domain, ship_addr, order_time)
        # Whoever prints the label (merchant, 3PL, or supplier) sees it too.
        scanner.see_address(f"label {merchant.logistics.value} {merchant.domain}", parcel.label)
        report.parcels_shipped += 1
        if merchant.carrier != USPS:
            report.parcels_non_usps += 1

        engine.intake(parcel, order_time + timedelta(days=1))
        if alias_used:
            report.relabels += 1
            report.cost_total += config.label_unit_cost
        engine.dispatch(parcel, order_time + timedelta(days=2))

        delivery_time = order_time + timedelta(days=3)
        if strategy is Strategy.PO_BOX and merchant.carrier != USPS:
            # Only USPS can put a parcel in a PO box.
            engine.fail_delivery(parcel, delivery_time)
            engine.return_to_merchant(parcel, delivery_time + timedelta(days=1))
            scanner.see_address(f"returned label {merchant.domain}", parcel.label)
            report.deliveries_failed += 1
        else:
            engine.deliver(parcel, delivery_time)
            report.deliveries_succeeded += 1
            if strategy is Strategy.VIRTUAL_MAILBOX:
                # Arrived at the mailbox; the customer must approve and pay
                # for the forwarding leg before it reaches home.
                report.forwarding_actions_required += 1
                report.cost_total += config.forwarding_fee
                report.home_deliveries += 1
            elif strategy is not Strategy.PO_BOX:
                report.home_deliveries += 1

        view = engine.tracking_view(parcel, ViewerRole.MERCHANT)
        scanner.see(f"tracking {merchant.domain}: {view.render_text()}")

    # Standing service fees for the box-based strategies.
    if strategy is Strategy.PO_BOX:
        report.cost_total += config.customers * config.po_box_annual_fee
    elif strategy is Strategy.VIRTUAL_MAILBOX:
        report.cost_total += config.customers * config.virtual_mailbox_monthly_fee

    # Ad season: merchants mail every address on file once the delay passes.
    ad_time = SIM_EPOCH + timedelta(days=config.unsolicited_delay_days)
    registry.sweep_expiry(ad_time)
    ad_index = 0
    for merchant in merchants:
        if not merchant.sends_ads:
            continue
        for addr in merchant.seen.values():
            report.unsolicited_attempts += 1
            ad = engine.create_parcel(f"AD{ad_index:05d}", merchant.domain, addr, ad_time)
            ad_index += 1
            engine.intake(ad, ad_time + timedelta(days=1))
            if ad.state is ParcelState.REFUSED:
                report.unsolicited_blocked += 1
                if engine.attributions and engine.attributions[-1].merchant_domain is not None:
                    report.attribution_hits += 1
                engine.return_to_merchant(ad, ad_time + timedelta(days=2))
                scanner.see_address(f"returned ad label {merchant.domain}", ad.label)
            else:
                engine.dispatch(ad, ad_time + timedelta(days=2))
                engine.deliver(ad, ad_time + timedelta(days=3))
                report.unsolicited_delivered += 1

    report.linkability = linkability([list(m.seen.keys()) for m in merchants])
    report.leak_artifacts_scanned = len(scanner.artifacts)
    report.leak_hits = scanner.hits()
    return report


def _storage_capacity(config: ScenarioConfig) -> int | None:
    if config.strategy is Strategy.PO_BOX:
        return config.po_box_capacity
    if config.strategy is Strategy.VIRTUAL_MAILBOX:
        return config.virtual_mailbox_capacity
    return None


def run_all_strategies(config: ScenarioConfig) -> dict[str, ScenarioReport]:
    """Run the same scenario once per strategy, same seed."""
    return {
        strategy.value: run_scenario(replace(config, strategy=strategy))
        for strategy in Strategy
    }


_TABLE_ROWS = [
    ("Able to send parcels to home address", lambda r: r.home_deliveries > 0),
    ("Requires customer input to forward", lambda r: r.forwarding_actions_required > 0),
    (
        "Can receive packages from all carriers",
        lambda r: r.orders_declined == 0 and r.deliveries_failed == 0,
    ),
    ("Space limitations", lambda r: r.storage_capacity is not None),
    ("Limits data coupling", lambda r: r.linkability == 0),
    ("Limits unsolicited mail", lambda r: r.unsolicited_delivered == 0),
    ("Additional costs involved", lambda r: r.cost_total > 0),
]


def comparison_table(reports: dict[str, ScenarioReport]) -> str:
    """Render the strategy-attribute comparison as text."""
    order = [s.value for s in Strategy if s.value in reports]
    width = max(len(label) for label, _ in _TABLE_ROWS)
    header = "Attribute".ljust(width) + "".join(f"  {name:>15}" for name in order)
    lines = [header, "-" * len(header)]
    for label, predicate in _TABLE_ROWS:
        cells = "".join(
            f"  {'Yes' if predicate(reports[name]) else 'No':>15}" for name in order
        )
        lines.append(label.ljust(width) + cells)
    return "\n".join(lines)


def report_summary(report: ScenarioReport) -> str:
    """One-strategy metrics as aligned text."""
    rec = report.to_record()
    width = max(len(k) for k in rec)
    shown = {k: f"{v:.2f}" if isinstance(v, float) else v for k, v in rec.items()}
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in shown.items())
