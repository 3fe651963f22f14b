"""JSON-over-HTTP front end for the alias registry and parcel relay.

One app owns one registry (replayed from the event log in the data dir), one
relay engine (parcels persisted as JSON), and one validation gateway. Wall
clock is read once per request at the edge; everything below takes explicit
`now` values, so tests can inject a fixed clock.
"""

from __future__ import annotations

import uuid
from contextlib import asynccontextmanager
from datetime import datetime, timezone
from typing import Callable

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import postal
from .codec import AliasAddressTemplate, ChecksumMismatch
from .config import ServiceConfig, official_fixture_path
from .postal import AddressError, PostalAddress
from .registry import (
    AliasRegistry,
    NamespaceExhausted,
    NotFound,
    RegistryError,
    TerminalState,
)
from .relay import IllegalParcelState, RelayEngine, ViewerRole
from .validation import ValidationGateway, ValidationMode

Clock = Callable[[], datetime]


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class AddressBody(BaseModel):
    name: str
    line1: str
    line2: str | None = None
    city: str
    state: str
    zip: str

    def to_postal(self) -> PostalAddress:
        try:
            return postal.normalize(
                self.name, self.line1, self.line2, self.city, self.state, self.zip
            )
        except AddressError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc


class IssueBody(BaseModel):
    true_address: AddressBody
    merchant_domain: str | None = None
    validity_days: int | None = Field(default=None, gt=0)
    subscription: bool = False
    count: int = Field(default=1, ge=1, le=1000)


class ValidateBody(BaseModel):
    address: AddressBody
    mode: str = "Hard"


class IntakeBody(BaseModel):
    sender: str
    address: AddressBody
    parcel_id: str | None = None


class ValidityBody(BaseModel):
    validity_days: int = Field(gt=0)


def _check_digits(digits: str) -> str:
    if len(digits) != 20 or not digits.isdigit():
        raise HTTPException(status_code=422, detail="alias identity must be 20 decimal digits")
    return digits


def create_app(config: ServiceConfig | None = None, *, clock: Clock | None = None) -> FastAPI:
    """Build the service around one registry/relay/gateway triple."""
    config = config or ServiceConfig()
    clock = clock or _utc_now

    template = AliasAddressTemplate(
        carrier_name=config.alias_name,
        street_suffix=config.alias_street,
        unit_prefix=config.alias_unit_prefix,
    )
    registry = AliasRegistry.replay(
        config.events_path,
        template,
        default_validity_days=config.validity_days,
        rng=config.seed,
    )
    engine = RelayEngine(registry)
    engine.load(config.parcels_path)
    gateway = ValidationGateway.from_fixture(
        official_fixture_path(config), registry=registry, template=template
    )

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        engine.save(config.parcels_path)
        registry.close()

    app = FastAPI(title="postalias", version="0.1.0", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.registry = registry
    app.state.engine = engine
    app.state.gateway = gateway
    app.state.clock = clock

    def _now(request: Request) -> datetime:
        return request.app.state.clock()

    def _alias_or_404(digits: str):
        record = registry.get(_check_digits(digits))
        if record is None:
            raise HTTPException(status_code=404, detail=f"no alias on record for {digits}")
        return record

    def _parcel_or_404(parcel_id: str):
        parcel = engine.parcels.get(parcel_id)
        if parcel is None:
            raise HTTPException(status_code=404, detail=f"no parcel {parcel_id}")
        return parcel

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "aliases": len(registry), "parcels": len(engine.parcels)}

    @app.post("/aliases", status_code=201)
    def issue_alias(body: IssueBody, request: Request) -> dict:
        true_address = body.true_address.to_postal()
        now = _now(request)
        try:
            if body.count == 1:
                return registry.issue(
                    true_address,
                    merchant_domain=body.merchant_domain,
                    validity_days=body.validity_days,
                    subscription=body.subscription,
                    now=now,
                ).to_record()
            records = registry.issue_batch(
                true_address,
                body.count,
                merchant_domain=body.merchant_domain,
                validity_days=body.validity_days,
                subscription=body.subscription,
                now=now,
            )
            return {"aliases": [r.to_record() for r in records]}
        except NamespaceExhausted as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        except RegistryError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/aliases")
    def list_aliases(short_code: str | None = None) -> dict:
        if short_code is not None:
            try:
                return registry.lookup_by_short_code(short_code).to_record()
            except NotFound as exc:
                raise HTTPException(status_code=404, detail=str(exc)) from exc
        records = sorted(registry.records(), key=lambda r: (r.issued_at.isoformat(), r.digits))
        return {"aliases": [r.to_record() for r in records]}

    @app.get("/aliases/{digits}")
    def get_alias(digits: str) -> dict:
        return _alias_or_404(digits).to_record()

    @app.post("/aliases/{digits}/revoke")
    def revoke_alias(digits: str, request: Request) -> dict:
        _alias_or_404(digits)
        try:
            return registry.revoke(digits, _now(request)).to_record()
        except TerminalState as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.post("/aliases/{digits}/validity")
    def change_validity(digits: str, body: ValidityBody, request: Request) -> dict:
        _alias_or_404(digits)
        try:
            return registry.update_validity(digits, body.validity_days, _now(request)).to_record()
        except TerminalState as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.get("/aliases/{digits}/attribution")
    def alias_attribution(digits: str) -> dict:
        record = _alias_or_404(digits)
        events = [a.to_record() for a in engine.attributions if a.alias_digits == digits]
        return {
            "alias": digits,
            "merchant_domain": record.merchant_domain,
            "attributions": events,
        }

    @app.get("/attributions")
    def attributions() -> dict:
        return {"attributions": [a.to_record() for a in engine.attributions]}

    @app.post("/validate")
    def validate(body: ValidateBody, request: Request) -> dict:
        try:
            mode = ValidationMode(body.mode)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=f"unknown mode {body.mode!r}") from exc
        addr = body.address.to_postal()
        now = _now(request)
        result = gateway.validate(addr, now)
        decision = gateway.checkout_gate(addr, mode, now)
        return {"result": result.value, "decision": decision.value}

    @app.post("/parcels/intake", status_code=201)
    def intake(body: IntakeBody, request: Request) -> dict:
        parcel_id = body.parcel_id or f"P-{uuid.uuid4().hex[:12]}"
        if parcel_id in engine.parcels:
            raise HTTPException(status_code=409, detail=f"parcel {parcel_id} already exists")
        now = _now(request)
        parcel = engine.create_parcel(parcel_id, body.sender, body.address.to_postal(), now)
        try:
            engine.intake(parcel, now)
        except ChecksumMismatch as exc:
            del engine.parcels[parcel_id]
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return parcel.to_record()

    @app.get("/parcels/{parcel_id}")
    def get_parcel(parcel_id: str) -> dict:
        return _parcel_or_404(parcel_id).to_record()

    def _parcel_step(parcel_id: str, request: Request, op) -> dict:
        parcel = _parcel_or_404(parcel_id)
        try:
            return op(parcel, _now(request)).to_record()
        except IllegalParcelState as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.post("/parcels/{parcel_id}/dispatch")
    def dispatch(parcel_id: str, request: Request) -> dict:
        return _parcel_step(parcel_id, request, engine.dispatch)

    @app.post("/parcels/{parcel_id}/deliver")
    def deliver(parcel_id: str, request: Request) -> dict:
        return _parcel_step(parcel_id, request, engine.deliver)

    @app.post("/parcels/{parcel_id}/fail")
    def fail_delivery(parcel_id: str, request: Request) -> dict:
        return _parcel_step(parcel_id, request, engine.fail_delivery)

    @app.post("/parcels/{parcel_id}/return")
    def return_to_merchant(parcel_id: str, request: Request) -> dict:
        return _parcel_step(parcel_id, request, engine.return_to_merchant)

    @app.get("/parcels/{parcel_id}/tracking")
    def tracking(parcel_id: str, viewer: str = "Merchant") -> dict:
        parcel = _parcel_or_404(parcel_id)
        try:
            role = ViewerRole(viewer)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=f"unknown viewer {viewer!r}") from exc
        return engine.tracking_view(parcel, role).to_record()

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted. Shutdown flushes state to disk."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
