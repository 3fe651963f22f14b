"""Carrier-side cost figures and namespace capacity arithmetic."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .codec import NamespaceConfig

# 2024 US package volume, summed from the per-carrier fixture.
TOTAL_US_PACKAGES_2024 = 22_400_000_000

# Share of USPS 2023 revenue from marketing mail. Documentation only: it
# quantifies the carrier's disincentive, nothing in the system consumes it.
MARKETING_MAIL_REVENUE_SHARE_2023 = 0.19

# Share of the US population living in ZIP codes with fewer than 100 people,
# per the 2020 census. Documentation only: bounds the small-ZIP disclosure
# risk of keeping city/state/ZIP unchanged.
SMALL_ZIP_POPULATION_SHARE = 0.0003


@dataclass(frozen=True, slots=True)
class CostModel:
    """Inputs to the carrier's implementation-cost arithmetic."""

    label_unit_cost: float = 0.05  # adhesive thermal label, per relabel
    employee_count: int = 121_000  # USPS retail associates, 2020
    training_minutes: float = 15.0
    hourly_rate: float = 20.0
    software_dev_estimate: tuple[float, float] = (100_000.0, 300_000.0)

    def __post_init__(self) -> None:
        values = (
            self.label_unit_cost,
            self.employee_count,
            self.training_minutes,
            self.hourly_rate,
            *self.software_dev_estimate,
        )
        if any(v < 0 for v in values):
            raise ValueError("cost model inputs must be non-negative")

    def training_cost_total(self) -> float:
        return training_cost(self.employee_count, self.training_minutes, self.hourly_rate)


def training_cost(employees: int, minutes: float, hourly_rate: float) -> float:
    """One-time cost of training `employees` for `minutes` each."""
    if employees < 0 or minutes < 0 or hourly_rate < 0:
        raise ValueError("training cost inputs must be non-negative")
    return employees * (minutes / 60.0) * hourly_rate


def capacity_check(volume_total: float, namespace: NamespaceConfig | None = None) -> float:
    """Headroom ratio: per-ZIP yearly capacity over total yearly volume."""
    if volume_total <= 0:
        raise ValueError("volume_total must be positive")
    namespace = namespace or NamespaceConfig()
    return namespace.capacity_per_zip_year / volume_total


def carrier_volumes() -> dict[str, int]:
    """2024 package counts per carrier, from the bundled fixture."""
    text = resources.files("postalias.fixtures").joinpath("carrier_volumes.json").read_text()
    return json.loads(text)
