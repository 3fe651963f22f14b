"""Emulated carrier address-validation API.

Validation is exact-match against an official-address fixture (standing in
for the USPS address database), augmented with a live view of the registry's
Issued/Active aliases. Hard validation blocks checkout on failure; soft
validation warns and lets the order through.
"""

from __future__ import annotations

from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Iterable

from .codec import AliasAddressTemplate, ChecksumMismatch, parse
from .eventlog import read_events
from .postal import PostalAddress, address_key
from .registry import AliasRegistry


class ValidationResult(Enum):
    VALID = "Valid"
    INVALID = "Invalid"


class ValidationMode(Enum):
    HARD = "Hard"
    SOFT = "Soft"


class GateDecision(Enum):
    PROCEED = "Proceed"
    PROCEED_WITH_WARNING = "ProceedWithWarning"
    BLOCKED = "Blocked"


def load_official_fixture(path: str | Path) -> list[PostalAddress]:
    """Load the official-address fixture (JSON lines of address records)."""
    return [PostalAddress.from_record(record) for record in read_events(path)]


class ValidationGateway:
    """Official-address database plus a live alias view.

    Without a registry attached the gateway behaves like a generic validator
    that knows nothing about aliases, which is exactly the situation where
    hard validation defeats the aliasing flow.
    """

    def __init__(
        self,
        official: Iterable[PostalAddress] = (),
        registry: AliasRegistry | None = None,
        template: AliasAddressTemplate | None = None,
    ):
        self._official: set[str] = {address_key(a) for a in official}
        self._registry = registry
        if template is not None:
            self._template = template
        elif registry is not None:
            self._template = registry.template
        else:
            self._template = AliasAddressTemplate()

    @classmethod
    def from_fixture(
        cls,
        path: str | Path,
        registry: AliasRegistry | None = None,
        template: AliasAddressTemplate | None = None,
    ) -> "ValidationGateway":
        return cls(load_official_fixture(path), registry=registry, template=template)

    def add_official(self, addr: PostalAddress) -> None:
        self._official.add(address_key(addr))

    @property
    def official_count(self) -> int:
        return len(self._official)

    def validate(self, addr: PostalAddress, now: datetime) -> ValidationResult:
        """Valid iff officially known, or a currently live alias.

        An alias-shaped address with a bad check digit is simply Invalid:
        merchants see a validation outcome, not a decoding error.
        """
        if address_key(addr) in self._official:
            return ValidationResult.VALID
        try:
            alias = parse(addr, self._template)
        except ChecksumMismatch:
            return ValidationResult.INVALID
        if alias is not None and self._registry is not None and self._registry.is_live(alias, now):
            return ValidationResult.VALID
        return ValidationResult.INVALID

    def checkout_gate(
        self, addr: PostalAddress, mode: ValidationMode, now: datetime
    ) -> GateDecision:
        """What happens at the merchant's checkout under the given mode."""
        if self.validate(addr, now) is ValidationResult.VALID:
            return GateDecision.PROCEED
        if mode is ValidationMode.SOFT:
            return GateDecision.PROCEED_WITH_WARNING
        return GateDecision.BLOCKED
