"""Service configuration: dataclass plus a small key=value file format.

The config file is deliberately plain text so operators can diff it:

    # comment
    data_dir = /var/lib/postalias
    validity_days = 30
    host = 127.0.0.1
    port = 8000

Unknown keys are rejected so typos fail loudly at startup.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class ServiceConfig:
    data_dir: Path = Path("data")
    validity_days: int = 30
    seed: int | None = None
    host: str = "127.0.0.1"
    port: int = 8000
    alias_name: str = "ABC Alias"
    alias_street: str = "Alias Way"
    alias_unit_prefix: str = "Unit"

    @property
    def events_path(self) -> Path:
        return self.data_dir / "events.jsonl"

    @property
    def parcels_path(self) -> Path:
        return self.data_dir / "parcels.json"


_INT_KEYS = {"validity_days", "seed", "port"}
_PATH_KEYS = {"data_dir"}


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse `key = value` lines (with # comments) into a raw string dict."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def parse_config_text(text: str) -> dict:
    """Parse key = value lines into a kwargs dict for ServiceConfig."""
    valid = {f.name for f in fields(ServiceConfig)}
    kwargs: dict = {}
    for key, value in parse_kv_text(text).items():
        if key not in valid:
            raise ConfigError(f"unknown key {key!r}")
        if key in _INT_KEYS:
            try:
                kwargs[key] = int(value)
            except ValueError:
                raise ConfigError(f"{key} needs an integer, got {value!r}") from None
        elif key in _PATH_KEYS:
            kwargs[key] = Path(value)
        else:
            kwargs[key] = value
    return kwargs


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return ServiceConfig(**parse_config_text(path.read_text(encoding="utf-8")))


def official_fixture_path(config: ServiceConfig) -> Path:
    """The official-address fixture: data-dir override, else the packaged one."""
    local = config.data_dir / "official_addresses.jsonl"
    if local.exists():
        return local
    return Path(
        str(importlib.resources.files("postalias").joinpath("fixtures/official_addresses.jsonl"))
    )
