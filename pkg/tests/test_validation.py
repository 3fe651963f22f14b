import pytest

from postalias.config import ServiceConfig, official_fixture_path
from postalias.postal import normalize
from postalias.registry import AliasRegistry
from postalias.validation import (
    GateDecision,
    ValidationGateway,
    ValidationMode,
    ValidationResult,
    load_official_fixture,
)

from conftest import T0, at_days


@pytest.fixture
def official():
    return load_official_fixture(official_fixture_path(ServiceConfig()))


def test_fixture_loads_and_contains_reference_address(official, john):
    assert len(official) >= 20
    assert john in official


def test_official_address_is_valid(official, john):
    gw = ValidationGateway(official)
    assert gw.validate(john, T0) is ValidationResult.VALID
    assert gw.official_count == len({a for a in official})


def test_unknown_address_is_invalid(official):
    gw = ValidationGateway(official)
    stranger = normalize("N Obody", "9999 Nowhere Road", None, "Ghost Town", "NV", "89001")
    assert gw.validate(stranger, T0) is ValidationResult.INVALID


def test_validation_ignores_case_and_spacing(official, john):
    gw = ValidationGateway(official)
    shouted = normalize("JOHN  SMITH", "123 MAIN  STREET", "UNIT 456", "ANY TOWN", "ny", "12345")
    assert gw.validate(shouted, T0) is ValidationResult.VALID


def test_live_alias_is_valid(registry, john, template):
    gw = ValidationGateway([], registry=registry, template=template)
    record = registry.issue(john, now=T0)
    assert gw.validate(record.alias_address, T0) is ValidationResult.VALID
    registry.resolve(record.digits, T0)
    assert gw.validate(record.alias_address, at_days(5)) is ValidationResult.VALID


def test_dead_alias_is_invalid_immediately(registry, john, template):
    gw = ValidationGateway([], registry=registry, template=template)
    expired = registry.issue(john, validity_days=10, now=T0)
    registry.resolve(expired.digits, T0)
    assert gw.validate(expired.alias_address, at_days(10.01)) is ValidationResult.INVALID

    revoked = registry.issue(john, now=T0)
    registry.revoke(revoked.digits, T0)
    assert gw.validate(revoked.alias_address, T0) is ValidationResult.INVALID


def test_alias_with_bad_check_digit_is_invalid(registry, john, template):
    record = registry.issue(john, now=T0)
    gw = ValidationGateway([], registry=registry, template=template)
    addr = record.alias_address
    digit = int(addr.line2[-1])
    smudged = normalize(
        addr.name, addr.line1, addr.line2[:-1] + str((digit + 1) % 10),
        addr.city, addr.state, addr.zip_code,
    )
    assert gw.validate(smudged, T0) is ValidationResult.INVALID


def test_alias_shape_without_registry_is_invalid(registry, john, template):
    record = registry.issue(john, now=T0)
    lone = ValidationGateway([])  # a validator that knows nothing of aliases
    assert lone.validate(record.alias_address, T0) is ValidationResult.INVALID


def test_checkout_gate_modes(official, registry, john, template):
    gw = ValidationGateway(official, registry=registry, template=template)
    stranger = normalize("N Obody", "9999 Nowhere Road", None, "Ghost Town", "NV", "89001")

    assert gw.checkout_gate(john, ValidationMode.HARD, T0) is GateDecision.PROCEED
    assert gw.checkout_gate(john, ValidationMode.SOFT, T0) is GateDecision.PROCEED
    assert gw.checkout_gate(stranger, ValidationMode.HARD, T0) is GateDecision.BLOCKED
    assert gw.checkout_gate(stranger, ValidationMode.SOFT, T0) is GateDecision.PROCEED_WITH_WARNING


def test_hard_validation_needs_carrier_side_entry(registry, john, template):
    """Hard checkout fails until the validator learns about the alias."""
    record = registry.issue(john, now=T0)
    without = ValidationGateway([])
    assert without.checkout_gate(record.alias_address, ValidationMode.HARD, T0) is GateDecision.BLOCKED
    assert (
        without.checkout_gate(record.alias_address, ValidationMode.SOFT, T0)
        is GateDecision.PROCEED_WITH_WARNING
    )

    with_registry = ValidationGateway([], registry=registry, template=template)
    assert (
        with_registry.checkout_gate(record.alias_address, ValidationMode.HARD, T0)
        is GateDecision.PROCEED
    )


def test_add_official(official):
    gw = ValidationGateway(official)
    newcomer = normalize("New Resident", "1 Fresh Street", None, "Madison", "WI", "53703")
    assert gw.validate(newcomer, T0) is ValidationResult.INVALID
    gw.add_official(newcomer)
    assert gw.validate(newcomer, T0) is ValidationResult.VALID


def test_from_fixture_constructor(tmp_path, john):
    path = tmp_path / "official.jsonl"
    import json

    path.write_text(json.dumps(john.to_record()) + "\n", encoding="utf-8")
    gw = ValidationGateway.from_fixture(path)
    assert gw.official_count == 1
    assert gw.validate(john, T0) is ValidationResult.VALID
