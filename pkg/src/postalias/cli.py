"""Command-line surface: alias operations, relay steps, service, simulator.

State lives under --data-dir (events.jsonl for the registry, parcels.json for
the relay). Every time-dependent command takes --now so scripted runs are
reproducible; without it the current UTC time is used.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import click

from .codec import AliasAddressTemplate, ChecksumMismatch
from .config import ConfigError, ServiceConfig, load_config, official_fixture_path, parse_kv_text
from .postal import AddressError, normalize
from .registry import AliasRegistry, NotFound, RegistryError
from .relay import RelayEngine, RelayError, ViewerRole
from .sim import (
    ScenarioConfig,
    Strategy,
    comparison_table,
    report_summary,
    run_all_strategies,
    run_scenario,
)
from .validation import ValidationGateway, ValidationMode


def _parse_now(value: str | None) -> datetime:
    if value is None:
        return datetime.now(timezone.utc)
    try:
        when = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise click.BadParameter(f"not an ISO-8601 timestamp: {value!r}")
    if when.tzinfo is None:
        when = when.replace(tzinfo=timezone.utc)
    return when


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


class _State:
    """Lazily opened registry/engine pair, flushed on command exit."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self._registry: AliasRegistry | None = None
        self._engine: RelayEngine | None = None

    @property
    def template(self) -> AliasAddressTemplate:
        return AliasAddressTemplate(
            carrier_name=self.config.alias_name,
            street_suffix=self.config.alias_street,
            unit_prefix=self.config.alias_unit_prefix,
        )

    @property
    def registry(self) -> AliasRegistry:
        if self._registry is None:
            self._registry = AliasRegistry.replay(
                self.config.events_path,
                self.template,
                default_validity_days=self.config.validity_days,
                rng=self.config.seed,
            )
        return self._registry

    @property
    def engine(self) -> RelayEngine:
        if self._engine is None:
            self._engine = RelayEngine(self.registry)
            self._engine.load(self.config.parcels_path)
        return self._engine

    def gateway(self) -> ValidationGateway:
        return ValidationGateway.from_fixture(
            official_fixture_path(self.config), registry=self.registry, template=self.template
        )

    def close(self) -> None:
        if self._engine is not None:
            self._engine.save(self.config.parcels_path)
        if self._registry is not None:
            self._registry.close()


_address_options = [
    click.option("--name", required=True, help="Recipient name line."),
    click.option("--line1", required=True, help="Street line."),
    click.option("--line2", default=None, help="Unit line, if any."),
    click.option("--city", required=True),
    click.option("--state", "state_code", required=True, help="Two-letter state code."),
    click.option("--zip", "zip_code", required=True, help="5-digit ZIP."),
]


def _with_address(fn):
    for option in reversed(_address_options):
        fn = option(fn)
    return fn


def _build_address(name, line1, line2, city, state, zip_code):
    try:
        return normalize(name, line1, line2, city, state, zip_code)
    except AddressError as exc:
        raise click.ClickException(f"bad address: {exc}")


@click.group()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="Key=value config file; flags override it.")
@click.option("--data-dir", type=click.Path(path_type=Path), default=None,
              help="Where events.jsonl and parcels.json live.")
@click.option("--seed", type=int, default=None, help="Seed the registry RNG (reproducible runs).")
@click.pass_context
def main(ctx: click.Context, config_path: Path | None, data_dir: Path | None, seed: int | None):
    """Carrier-side mailing address aliasing."""
    try:
        config = load_config(config_path) if config_path else ServiceConfig()
    except ConfigError as exc:
        raise click.ClickException(str(exc))
    if data_dir is not None:
        config = replace(config, data_dir=data_dir)
    if seed is not None:
        config = replace(config, seed=seed)
    state = _State(config)
    ctx.obj = state
    ctx.call_on_close(state.close)


@main.command()
@_with_address
@click.option("--merchant", default=None, help="Web domain the alias is for.")
@click.option("--validity-days", type=int, default=None)
@click.option("--subscription", is_flag=True, help="Alias stays valid until revoked.")
@click.option("--count", type=int, default=1, show_default=True)
@click.option("--now", default=None, help="ISO-8601 issuance time.")
@click.pass_obj
def issue(state: _State, name, line1, line2, city, state_code, zip_code, merchant,
          validity_days, subscription, count, now):
    """Issue one or more aliases for a true address."""
    addr = _build_address(name, line1, line2, city, state_code, zip_code)
    when = _parse_now(now)
    try:
        if count == 1:
            _echo_json(state.registry.issue(
                addr, merchant_domain=merchant, validity_days=validity_days,
                subscription=subscription, now=when,
            ).to_record())
        else:
            records = state.registry.issue_batch(
                addr, count, merchant_domain=merchant, validity_days=validity_days,
                subscription=subscription, now=when,
            )
            _echo_json({"aliases": [r.to_record() for r in records]})
    except RegistryError as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.argument("digits")
@click.option("--now", default=None)
@click.pass_obj
def revoke(state: _State, digits: str, now: str | None):
    """Revoke an alias by its 20-digit identity."""
    try:
        _echo_json(state.registry.revoke(digits, _parse_now(now)).to_record())
    except RegistryError as exc:
        raise click.ClickException(str(exc))


@main.command()
@_with_address
@click.option("--mode", type=click.Choice(["Hard", "Soft"]), default="Hard", show_default=True)
@click.option("--now", default=None)
@click.pass_obj
def validate(state: _State, name, line1, line2, city, state_code, zip_code, mode, now):
    """Validate an address as a merchant checkout would."""
    addr = _build_address(name, line1, line2, city, state_code, zip_code)
    when = _parse_now(now)
    gateway = state.gateway()
    result = gateway.validate(addr, when)
    decision = gateway.checkout_gate(addr, ValidationMode(mode), when)
    _echo_json({"result": result.value, "decision": decision.value})


@main.command()
@_with_address
@click.option("--sender", required=True, help="Merchant identifier on the manifest.")
@click.option("--parcel-id", default=None)
@click.option("--now", default=None)
@click.pass_obj
def intake(state: _State, name, line1, line2, city, state_code, zip_code, sender, parcel_id, now):
    """Accept a labeled parcel at the carrier; aliases are resolved here."""
    addr = _build_address(name, line1, line2, city, state_code, zip_code)
    when = _parse_now(now)
    engine = state.engine
    parcel_id = parcel_id or f"P{len(engine.parcels):06d}"
    if parcel_id in engine.parcels:
        raise click.ClickException(f"parcel {parcel_id} already exists")
    parcel = engine.create_parcel(parcel_id, sender, addr, when)
    try:
        engine.intake(parcel, when)
    except ChecksumMismatch as exc:
        del engine.parcels[parcel_id]
        raise click.ClickException(f"manual handling required: {exc}")
    _echo_json(parcel.to_record())


@main.command()
@click.argument("parcel_id")
@click.option("--viewer", type=click.Choice([r.value for r in ViewerRole]),
              default="Merchant", show_default=True)
@click.option("--step", type=click.Choice(["dispatch", "deliver", "fail", "return"]),
              default=None, help="Advance the parcel before rendering the view.")
@click.option("--now", default=None)
@click.pass_obj
def track(state: _State, parcel_id: str, viewer: str, step: str | None, now: str | None):
    """Show a parcel's tracking view, optionally advancing it one step."""
    engine = state.engine
    parcel = engine.parcels.get(parcel_id)
    if parcel is None:
        raise click.ClickException(f"no parcel {parcel_id}")
    if step is not None:
        op = {
            "dispatch": engine.dispatch,
            "deliver": engine.deliver,
            "fail": engine.fail_delivery,
            "return": engine.return_to_merchant,
        }[step]
        try:
            op(parcel, _parse_now(now))
        except RelayError as exc:
            raise click.ClickException(str(exc))
    _echo_json(engine.tracking_view(parcel, ViewerRole(viewer)).to_record())


@main.command()
@click.option("--now", default=None)
@click.option("--retention-year", type=int, default=None,
              help="Also purge non-Active records from years before this one.")
@click.pass_obj
def sweep(state: _State, now: str | None, retention_year: int | None):
    """Expire overdue aliases; optionally run the retention purge."""
    when = _parse_now(now)
    expired = state.registry.sweep_expiry(when)
    purged = (
        state.registry.retention_sweep(retention_year) if retention_year is not None else 0
    )
    _echo_json({"expired": expired, "purged": purged})


@main.command()
@click.argument("short_code")
@click.pass_obj
def lookup(state: _State, short_code: str):
    """Find the alias record behind a relabel short code."""
    try:
        _echo_json(state.registry.lookup_by_short_code(short_code).to_record())
    except NotFound as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.pass_obj
def serve(state: _State, host: str | None, port: int | None):
    """Run the HTTP service (blocks until interrupted)."""
    from .service import serve as run_service

    config = state.config
    if host is not None:
        config = replace(config, host=host)
    if port is not None:
        config = replace(config, port=port)
    run_service(config)


@main.command()
@click.option("--scenario", "--config", "scenario_path",
              type=click.Path(path_type=Path, exists=True),
              default=None, help="Key=value scenario file.")
@click.option("--strategy", default="all", show_default=True,
              help='One of the strategy names, or "all".')
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Write the machine-readable report(s) here as JSON.")
def simulate(scenario_path: Path | None, strategy: str, seed: int | None, out: Path | None):
    """Run the strategy-comparison simulator and print its report."""
    mapping: dict = {}
    if scenario_path is not None:
        try:
            mapping = parse_kv_text(scenario_path.read_text(encoding="utf-8"))
        except ConfigError as exc:
            raise click.ClickException(str(exc))
    try:
        config = ScenarioConfig.from_mapping(mapping)
    except (ValueError, TypeError) as exc:
        raise click.ClickException(str(exc))
    if seed is not None:
        config = replace(config, seed=seed)

    if strategy == "all":
        reports = run_all_strategies(config)
        click.echo(comparison_table(reports))
        for name, report in reports.items():
            click.echo(f"\n[{name}]")
            click.echo(report_summary(report))
        payload = {name: r.to_record() for name, r in reports.items()}
    else:
        try:
            config = replace(config, strategy=Strategy(strategy))
        except ValueError:
            choices = ", ".join(s.value for s in Strategy)
            raise click.ClickException(f"unknown strategy {strategy!r}; pick one of {choices} or all")
        report = run_scenario(config)
        click.echo(report_summary(report))
        payload = report.to_record()

    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        click.echo(f"\nreport written to {out}", err=True)


if __name__ == "__main__":
    sys.exit(main())
