"""Acceptance gate: one test per shipping criterion, each printing a verdict.

Every test here restates a release requirement as executable checks with
pinned tolerances and wall-clock budgets. The verdict lines survive pytest's
capture so a plain run shows one PASS/FAIL per criterion.
"""

import random
import time
from contextlib import contextmanager
from dataclasses import replace
from datetime import timedelta

import pytest

from postalias.codec import (
    AliasAddressTemplate,
    NamespaceConfig,
    luhn_valid,
    make_alias_code,
)
from postalias.costs import TOTAL_US_PACKAGES_2024, carrier_volumes, training_cost
from postalias.postal import normalize
from postalias.registry import (
    ALLOWED_TRANSITIONS,
    AliasRegistry,
    AliasStatus,
    Refusal,
)
from postalias.sim import ScenarioConfig, Strategy, run_all_strategies, run_scenario
from postalias.validation import (
    GateDecision,
    ValidationGateway,
    ValidationMode,
    ValidationResult,
)

from conftest import T0


@contextmanager
def criterion(capsys, name: str, budget_seconds: float | None = None):
    """Time a criterion body and print exactly one verdict line for it."""
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"ACCEPTANCE {name}: FAIL")
        raise
    elapsed = time.perf_counter() - started
    if budget_seconds is not None and elapsed >= budget_seconds:
        with capsys.disabled():
            print(f"ACCEPTANCE {name}: FAIL ({elapsed:.2f}s, budget {budget_seconds:g}s)")
        pytest.fail(f"{name} exceeded its {budget_seconds:g}s budget: {elapsed:.2f}s")
    timing = f" [{elapsed:.2f}s < {budget_seconds:g}s]" if budget_seconds is not None else ""
    with capsys.disabled():
        print(f"ACCEPTANCE {name}: PASS{timing}")


def fresh_registry(seed: int) -> AliasRegistry:
    return AliasRegistry(AliasAddressTemplate(), rng=random.Random(seed), log_path=None)


TRUE_ADDRESSES = [
    normalize("John Smith", "123 Main Street", "Unit 456", "Any Town", "NY", "12345"),
    normalize("Jane Roe", "77 Oak Avenue", None, "Springfield", "IL", "62701"),
    normalize("Ana Lopez", "9 Pine Court", "Apt 2B", "Riverside", "CA", "92501"),
    normalize("Sam Carter", "400 Birch Road", None, "Madison", "WI", "53703"),
    normalize("Priya Patel", "58 Cedar Lane", "Suite 11", "Austin", "TX", "78701"),
]


def test_capacity_arithmetic(capsys):
    with criterion(capsys, "capacity-arithmetic", budget_seconds=1.0):
        ns = NamespaceConfig()
        assert ns.capacity_per_zip_year == 10**16
        assert ns.address_space_per_zip == 10**20


def test_cost_reproduction(capsys):
    with criterion(capsys, "cost-reproduction", budget_seconds=1.0):
        assert training_cost(121_000, 15, 20) == 605_000
        volumes = carrier_volumes()
        assert sum(volumes.values()) == 22_400_000_000
        assert TOTAL_US_PACKAGES_2024 == 22_400_000_000


def test_format_conformance(capsys):
    issues_total = 100_000
    with criterion(capsys, "format-conformance", budget_seconds=10.0):
        registry = fresh_registry(2001)
        violations = 0
        per_zip = issues_total // len(TRUE_ADDRESSES)
        for true_addr in TRUE_ADDRESSES:
            for record in registry.issue_batch(true_addr, per_zip, now=T0):
                rendered = record.alias_address
                if not (
                    len(rendered.name) <= 30
                    and len(rendered.line1) <= 30
                    and len(rendered.line2 or "") <= 30
                    and rendered.city == true_addr.city
                    and rendered.state == true_addr.state
                    and rendered.zip_code == true_addr.zip_code
                ):
                    violations += 1
        assert len(registry.records()) == issues_total
        assert violations == 0


def test_checksum_strength(capsys):
    aliases = 1_000
    with criterion(capsys, "checksum-strength", budget_seconds=30.0):
        rng = random.Random(2002)
        missed = 0
        trials = 0
        for _ in range(aliases):
            payload = f"{rng.randrange(10**16):016d}"
            code = make_alias_code("12345", rng.randrange(1970, 2970), payload)
            digits = code.year_code + code.payload + code.check_digit
            assert luhn_valid(digits)
            for position in range(19):
                original = digits[position]
                for wrong in "0123456789":
                    if wrong == original:
                        continue
                    trials += 1
                    mutated = digits[:position] + wrong + digits[position + 1 :]
                    if luhn_valid(mutated):
                        missed += 1
        assert trials == aliases * 19 * 9
        assert missed == 0  # 100% single-substitution detection


def test_lifecycle_property_volume(capsys):
    """Random operation sequences: every observed edge must be a legal one."""
    sequences = 10_000
    with criterion(capsys, "lifecycle-properties", budget_seconds=60.0):
        registry = fresh_registry(2003)
        true_addr = TRUE_ADDRESSES[0]
        failures = 0
        for index in range(sequences):
            rng = random.Random(index)
            record = registry.issue(
                true_addr,
                validity_days=rng.randint(1, 40),
                subscription=rng.random() < 0.1,
                now=T0,
            )
            digits = record.digits
            # resolve-after-issue identity
            if registry.resolve(digits, T0) != true_addr:
                failures += 1
            if registry.lookup_by_short_code(record.short_code).digits != digits:
                failures += 1
            clock = T0
            for _ in range(rng.randint(1, 6)):
                before = registry.get(digits).status
                op = rng.choice(("use", "revoke", "sweep", "resolve"))
                clock = clock + timedelta(days=rng.randint(0, 30))
                if op == "use":
                    if before is AliasStatus.ISSUED:
                        registry.mark_first_use(digits, clock)
                elif op == "revoke":
                    if before not in (AliasStatus.EXPIRED, AliasStatus.REVOKED):
                        registry.revoke(digits, clock)
                elif op == "sweep":
                    registry.sweep_expiry(clock)
                else:
                    registry.resolve(digits, clock)
                after = registry.get(digits).status
                if after is not before and (before, after) not in ALLOWED_TRANSITIONS:
                    failures += 1
            # terminal states deny resolution outright
            final = registry.get(digits)
            if final.status in (AliasStatus.EXPIRED, AliasStatus.REVOKED):
                if not isinstance(registry.resolve(digits, clock), Refusal):
                    failures += 1
            elif final.status is AliasStatus.ACTIVE and not final.subscription:
                past_window = final.first_used_at + timedelta(days=final.validity_days + 1)
                if registry.resolve(digits, past_window) is not Refusal.EXPIRED:
                    failures += 1
        assert failures == 0


def test_uniqueness_at_scale(capsys):
    issues_total = 1_000_000
    with criterion(capsys, "uniqueness-at-scale", budget_seconds=60.0):
        registry = fresh_registry(2004)
        true_addr = TRUE_ADDRESSES[0]
        for _ in range(10):
            registry.issue_batch(true_addr, issues_total // 10, now=T0)
        records = registry.records()
        assert len(records) == issues_total
        payloads = registry.payloads_in(true_addr.zip_code, T0.year)
        assert len(payloads) == issues_total  # zero duplicate payloads
        live_codes = {r.short_code for r in records}
        assert len(live_codes) == issues_total  # zero live short-code collisions


DESK_SCALE = ScenarioConfig()  # 50 customers, 10 merchants, 500 orders, seed 42


def test_strategy_comparison_desk_scale(capsys):
    with criterion(capsys, "strategy-comparison", budget_seconds=30.0):
        for seed in (DESK_SCALE.seed, 1337):
            reports = run_all_strategies(replace(DESK_SCALE, seed=seed))

            aliasing = reports[Strategy.ALIASING.value]
            assert aliasing.unsolicited_delivered == 0
            assert aliasing.linkability == 0
            # every home delivery succeeds where the carrier offers aliasing
            assert aliasing.orders_declined == 0
            assert aliasing.deliveries_failed == 0
            assert aliasing.home_deliveries == aliasing.parcels_shipped

            true_addr = reports[Strategy.TRUE_ADDRESS.value]
            assert true_addr.linkability > 0
            assert true_addr.unsolicited_delivered > 0

            po_box = reports[Strategy.PO_BOX.value]
            assert po_box.deliveries_failed == po_box.parcels_non_usps

            virtual = reports[Strategy.VIRTUAL_MAILBOX.value]
            assert virtual.forwarding_actions_required == virtual.deliveries_succeeded


def test_leak_freedom_sweep(capsys):
    with criterion(capsys, "leak-freedom", budget_seconds=30.0):
        for name, report in run_all_strategies(DESK_SCALE).items():
            assert report.leak_hits == 0, name

        aliasing = run_scenario(replace(DESK_SCALE, strategy=Strategy.ALIASING))
        assert aliasing.leak_artifacts_scanned > 0

        # mixed roster: alias shipments stay leak-free alongside plain ones
        mixed = run_scenario(
            replace(
                DESK_SCALE,
                strategy=Strategy.ALIASING,
                aliasing_carriers=("USPS", "UPS"),
            )
        )
        assert mixed.leak_hits == 0
        assert mixed.leak_artifacts_scanned > 0


def test_checkout_validation_behavior(capsys):
    with criterion(capsys, "checkout-validation", budget_seconds=5.0):
        registry = fresh_registry(2005)
        true_addr = TRUE_ADDRESSES[0]
        record = registry.issue(true_addr, now=T0)

        # merchant gateway with no carrier-side aliases at all
        plain = ValidationGateway([true_addr])
        assert (
            plain.checkout_gate(record.alias_address, ValidationMode.HARD, T0)
            is GateDecision.BLOCKED
        )

        # the carrier adds its alias view; the same checkout now proceeds
        carrier_backed = ValidationGateway(
            [true_addr], registry=registry, template=registry.template
        )
        assert (
            carrier_backed.validate(record.alias_address, T0) is ValidationResult.VALID
        )
        assert (
            carrier_backed.checkout_gate(record.alias_address, ValidationMode.HARD, T0)
            is GateDecision.PROCEED
        )

        # soft validation warns on unknown addresses instead of blocking
        stranger = normalize("Kim Doe", "1 Nowhere Road", None, "Any Town", "NY", "12345")
        assert (
            carrier_backed.checkout_gate(stranger, ValidationMode.SOFT, T0)
            is GateDecision.PROCEED_WITH_WARNING
        )
        assert (
            carrier_backed.checkout_gate(stranger, ValidationMode.HARD, T0)
            is GateDecision.BLOCKED
        )
