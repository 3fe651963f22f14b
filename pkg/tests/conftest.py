"""Shared fixtures: fixed clocks, canonical addresses, registry factories."""

from __future__ import annotations

from datetime import datetime, timezone

import pytest
from hypothesis import HealthCheck, settings

from postalias.codec import AliasAddressTemplate
from postalias.postal import PostalAddress, normalize
from postalias.registry import AliasRegistry

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# Fixed instants so expiry arithmetic is reproducible everywhere.
T0 = datetime(2025, 6, 1, 12, 0, tzinfo=timezone.utc)


def at_days(days: float) -> datetime:
    from datetime import timedelta

    return T0 + timedelta(days=days)


@pytest.fixture
def t0() -> datetime:
    return T0


@pytest.fixture
def template() -> AliasAddressTemplate:
    return AliasAddressTemplate()


@pytest.fixture
def john() -> PostalAddress:
    return normalize("John Smith", "123 Main Street", "Unit 456", "Any Town", "NY", "12345")


@pytest.fixture
def jane() -> PostalAddress:
    return normalize("Jane Doe", "77 Oak Avenue", None, "Springfield", "IL", "62704")


@pytest.fixture
def registry(template) -> AliasRegistry:
    return AliasRegistry(template, rng=1234)
