"""Carrier-side mailing address aliasing.

Customers shop with disposable alias addresses; the carrier resolves them to
true addresses at intake, relabels the parcel, and keeps the mapping private.
This package holds the namespace codec, the alias registry, the validation
gateway, the parcel relay, a strategy-comparison simulator, and the HTTP/CLI
front ends.
"""

from .codec import AliasAddressTemplate, AliasCode, NamespaceConfig, checksum, luhn_valid
from .costs import CostModel, capacity_check, carrier_volumes, training_cost
from .postal import PostalAddress, address_key, normalize
from .registry import AliasRegistry, AliasStatus, Refusal
from .relay import RelayEngine, ViewerRole
from .sim import ScenarioConfig, ScenarioReport, Strategy, run_all_strategies, run_scenario
from .validation import GateDecision, ValidationGateway, ValidationMode

__version__ = "0.1.0"

__all__ = [
    "AliasAddressTemplate",
    "AliasCode",
    "AliasRegistry",
    "AliasStatus",
    "CostModel",
    "GateDecision",
    "NamespaceConfig",
    "PostalAddress",
    "Refusal",
    "RelayEngine",
    "ScenarioConfig",
    "ScenarioReport",
    "Strategy",
    "ValidationGateway",
    "ValidationMode",
    "ViewerRole",
    "address_key",
    "capacity_check",
    "carrier_volumes",
    "checksum",
    "luhn_valid",
    "normalize",
    "run_all_strategies",
    "run_scenario",
    "training_cost",
    "__version__",
]
