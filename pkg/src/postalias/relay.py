"""Carrier-side parcel engine: intake, relabeling, returns, tracking views.

Intake is where the alias protocol touches the physical flow: an alias label
is resolved and replaced with a relabel carrying the true address and the
short code, a dead alias refuses the parcel and records an attribution event,
and anything else passes through untouched. The return path restores the
alias label so the merchant never sees a true address, and tracking views are
sanitized per viewer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path

from .codec import parse
from .postal import PostalAddress
from .registry import AliasRegistry, Refusal


class ParcelState(Enum):
    AT_MERCHANT = "AtMerchant"
    AT_CARRIER = "AtCarrier"
    OUT_FOR_DELIVERY = "OutForDelivery"
    DELIVERED = "Delivered"
    RETURNED_TO_MERCHANT = "ReturnedToMerchant"
    REFUSED = "Refused"


class EventKind(Enum):
    ACCEPTED = "Accepted"
    IN_TRANSIT = "InTransit"
    OUT_FOR_DELIVERY = "OutForDelivery"
    DELIVERED = "Delivered"
    RETURNED = "Returned"


class Granularity(Enum):
    CITY = "City"
    FACILITY = "Facility"
    STREET = "Street"


class ViewerRole(Enum):
    MERCHANT = "Merchant"
    CUSTOMER = "Customer"
    CARRIER_INTERNAL = "CarrierInternal"


class RelayError(Exception):
    pass


class NoAliasOnRecord(RelayError):
    pass


class IllegalParcelState(RelayError):
    pass


@dataclass(slots=True)
class LabelEntry:
    at: datetime
    address: PostalAddress
    short_code: str | None

    def to_record(self) -> dict:
        return {
            "at": self.at.isoformat(),
            "address": self.address.to_record(),
            "short_code": self.short_code,
        }


@dataclass(slots=True)
class TrackingEvent:
    time: datetime
    kind: EventKind
    location_granularity: Granularity
    location: str

    def to_record(self) -> dict:
        return {
            "time": self.time.isoformat(),
            "kind": self.kind.value,
            "granularity": self.location_granularity.value,
            "location": self.location,
        }


@dataclass(slots=True)
class AttributionEvent:
    """A dead alias arrived on a label: who had that alias on file?"""

    at: datetime
    alias_digits: str
    merchant_domain: str | None
    sender: str
    reason: Refusal

    def to_record(self) -> dict:
        return {
            "at": self.at.isoformat(),
            "alias": self.alias_digits,
            "merchant_domain": self.merchant_domain,
            "sender": self.sender,
            "reason": self.reason.value,
        }


@dataclass(slots=True)
class Parcel:
    parcel_id: str
    sender: str
    label: PostalAddress
    state: ParcelState
    relabel_history: list[LabelEntry]
    events: list[TrackingEvent]
    alias_digits: str | None = None
    alias_address: PostalAddress | None = None
    undeliverable: bool = False

    @classmethod
    def create(cls, parcel_id: str, sender: str, label: PostalAddress, now: datetime) -> "Parcel":
        return cls(
            parcel_id=parcel_id,
            sender=sender,
            label=label,
            state=ParcelState.AT_MERCHANT,
            relabel_history=[LabelEntry(now, label, None)],
            events=[],
        )

    @property
    def is_alias_shipment(self) -> bool:
        return self.alias_digits is not None

    def _relabel(self, now: datetime, address: PostalAddress, short_code: str | None) -> None:
        self.relabel_history.append(LabelEntry(now, address, short_code))
        self.label = address

    def to_record(self) -> dict:
        return {
            "parcel_id": self.parcel_id,
            "sender": self.sender,
            "label": self.label.to_record(),
            "state": self.state.value,
            "relabel_history": [e.to_record() for e in self.relabel_history],
            "events": [e.to_record() for e in self.events],
            "alias": self.alias_digits,
            "alias_address": self.alias_address.to_record() if self.alias_address else None,
            "undeliverable": self.undeliverable,
        }


@dataclass(slots=True)
class TrackingView:
    """What one viewer is allowed to see about a parcel."""

    viewer: ViewerRole
    destination: PostalAddress
    short_code: str | None
    events: list[TrackingEvent]

    def to_record(self) -> dict:
        return {
            "viewer": self.viewer.value,
            "destination": self.destination.to_record(),
            "short_code": self.short_code,
            "events": [e.to_record() for e in self.events],
        }

    def render_text(self) -> str:
        """Flatten the view to text, as a merchant dashboard would show it."""
        return json.dumps(self.to_record(), sort_keys=True)


def _city_loc(addr: PostalAddress) -> str:
    return f"{addr.city}, {addr.state}"


class RelayEngine:
    """Ties the registry to the physical parcel flow."""

    def __init__(self, registry: AliasRegistry):
        self.registry = registry
        self.parcels: dict[str, Parcel] = {}
        self.attributions: list[AttributionEvent] = []

    def create_parcel(
        self, parcel_id: str, sender: str, label: PostalAddress, now: datetime
    ) -> Parcel:
        parcel = Parcel.create(parcel_id, sender, label, now)
        self.parcels[parcel_id] = parcel
        return parcel

    def intake(self, parcel: Parcel, now: datetime) -> Parcel:
        """Accept a parcel from the merchant side.

        Alias labels resolve to a relabel with the true address and short
        code; dead aliases refuse the parcel and log an attribution event; a
        checksum error on an alias-shaped label raises ChecksumMismatch for
        manual handling; ordinary addresses pass through unchanged.
        """
        if parcel.state is not ParcelState.AT_MERCHANT:
            raise IllegalParcelState(f"parcel {parcel.parcel_id} already intaken")
        alias = parse(parcel.label, self.registry.template)
        if alias is None:
            parcel.state = ParcelState.AT_CARRIER
            parcel.events.append(
                TrackingEvent(now, EventKind.ACCEPTED, Granularity.CITY, _city_loc(parcel.label))
            )
            return parcel

        parcel.alias_digits = alias.digits
        result = self.registry.resolve(alias, now)
        if isinstance(result, Refusal):
            record = self.registry.get(alias)
            parcel.alias_address = record.alias_address if record else parcel.label
            parcel.state = ParcelState.REFUSED
            self.attributions.append(
                AttributionEvent(
                    at=now,
                    alias_digits=alias.digits,
                    merchant_domain=record.merchant_domain if record else None,
                    sender=parcel.sender,
                    reason=result,
                )
            )
            return parcel

        record = self.registry.lookup(alias)
        parcel.alias_address = record.alias_address
        parcel._relabel(now, result, record.short_code)
        parcel.state = ParcelState.AT_CARRIER
        parcel.events.append(
            TrackingEvent(now, EventKind.ACCEPTED, Granularity.CITY, _city_loc(parcel.label))
        )
        return parcel

    def dispatch(self, parcel: Parcel, now: datetime) -> Parcel:
        """Move an accepted parcel onto its delivery route."""
        if parcel.state is not ParcelState.AT_CARRIER:
            raise IllegalParcelState(f"parcel {parcel.parcel_id} is not at the carrier")
        parcel.events.append(
            TrackingEvent(
                now,
                EventKind.IN_TRANSIT,
                Granularity.FACILITY,
                f"{_city_loc(parcel.label)} sort facility",
            )
        )
        if parcel.is_alias_shipment:
            # Route detail stays at facility level so the final address and
            # delivery route are never exposed through tracking.
            parcel.events.append(
                TrackingEvent(
                    now,
                    EventKind.OUT_FOR_DELIVERY,
                    Granularity.FACILITY,
                    f"out for delivery, {_city_loc(parcel.label)}",
                )
            )
        else:
            parcel.events.append(
                TrackingEvent(
                    now,
                    EventKind.OUT_FOR_DELIVERY,
                    Granularity.STREET,
                    f"route via {parcel.label.line1}, {_city_loc(parcel.label)}",
                )
            )
        parcel.state = ParcelState.OUT_FOR_DELIVERY
        return parcel

    def deliver(self, parcel: Parcel, now: datetime) -> Parcel:
        if parcel.state is not ParcelState.OUT_FOR_DELIVERY or parcel.undeliverable:
            raise IllegalParcelState(f"parcel {parcel.parcel_id} is not deliverable")
        parcel.events.append(
            TrackingEvent(
                now, EventKind.DELIVERED, Granularity.CITY, f"delivered, {_city_loc(parcel.label)}"
            )
        )
        parcel.state = ParcelState.DELIVERED
        return parcel

    def fail_delivery(self, parcel: Parcel, now: datetime) -> Parcel:
        """Mark the delivery attempt failed; the parcel heads back."""
        if parcel.state is not ParcelState.OUT_FOR_DELIVERY:
            raise IllegalParcelState(f"parcel {parcel.parcel_id} is not out for delivery")
        parcel.undeliverable = True
        parcel.events.append(
            TrackingEvent(
                now,
                EventKind.IN_TRANSIT,
                Granularity.CITY,
                f"delivery attempt failed, {_city_loc(parcel.label)}",
            )
        )
        return parcel

    def return_to_merchant(self, parcel: Parcel, now: datetime) -> Parcel:
        """Send an undeliverable or refused parcel back.

        For alias shipments the outermost label is reset to the alias address
        first, so the true address never travels back to the merchant.
        Pass-through parcels return with their original label.
        """
        if parcel.state is not ParcelState.REFUSED and not parcel.undeliverable:
            raise IllegalParcelState(
                f"parcel {parcel.parcel_id} is neither refused nor undeliverable"
            )
        if parcel.alias_digits is not None:
            if parcel.alias_address is None:
                raise NoAliasOnRecord(
                    f"alias parcel {parcel.parcel_id} has no alias address to restore"
                )
            if parcel.label != parcel.alias_address:
                parcel._relabel(now, parcel.alias_address, None)
        parcel.events.append(
            TrackingEvent(
                now, EventKind.RETURNED, Granularity.CITY, f"returned to sender, {parcel.sender}"
            )
        )
        parcel.state = ParcelState.RETURNED_TO_MERCHANT
        return parcel

    def tracking_view(self, parcel: Parcel, viewer: ViewerRole) -> TrackingView:
        """Sanitize the event history for one viewer.

        Merchants get city-level events only and the alias as destination;
        customers get everything except street-level route detail, plus the
        short code printed on the relabel; carrier staff see it all.
        """
        if viewer is ViewerRole.CARRIER_INTERNAL:
            return TrackingView(viewer, parcel.label, None, list(parcel.events))
        if viewer is ViewerRole.CUSTOMER:
            short_code = next(
                (e.short_code for e in reversed(parcel.relabel_history) if e.short_code),
                None,
            )
            events = [
                e for e in parcel.events if e.location_granularity is not Granularity.STREET
            ]
            return TrackingView(viewer, parcel.label, short_code, events)
        destination = parcel.alias_address if parcel.alias_address is not None else parcel.label
        events = [e for e in parcel.events if e.location_granularity is Granularity.CITY]
        return TrackingView(viewer, destination, None, events)

    # -- persistence for the CLI and service --------------------------------

    def save(self, path: str | Path) -> None:
        payload = {
            "parcels": [p.to_record() for p in self.parcels.values()],
            "attributions": [a.to_record() for a in self.attributions],
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")

    def load(self, path: str | Path) -> None:
        path = Path(path)
        if not path.exists():
            return
        payload = json.loads(path.read_text(encoding="utf-8"))
        for rec in payload.get("parcels", []):
            parcel = _parcel_from_record(rec)
            self.parcels[parcel.parcel_id] = parcel
        for rec in payload.get("attributions", []):
            self.attributions.append(
                AttributionEvent(
                    at=datetime.fromisoformat(rec["at"]),
                    alias_digits=rec["alias"],
                    merchant_domain=rec["merchant_domain"],
                    sender=rec["sender"],
                    reason=Refusal(rec["reason"]),
                )
            )


def _parcel_from_record(rec: dict) -> Parcel:
    return Parcel(
        parcel_id=rec["parcel_id"],
        sender=rec["sender"],
        label=PostalAddress.from_record(rec["label"]),
        state=ParcelState(rec["state"]),
        relabel_history=[
            LabelEntry(
                at=datetime.fromisoformat(e["at"]),
                address=PostalAddress.from_record(e["address"]),
                short_code=e["short_code"],
            )
            for e in rec["relabel_history"]
        ],
        events=[
            TrackingEvent(
                time=datetime.fromisoformat(e["time"]),
                kind=EventKind(e["kind"]),
                location_granularity=Granularity(e["granularity"]),
                location=e["location"],
            )
            for e in rec["events"]
        ],
        alias_digits=rec.get("alias"),
        alias_address=(
            PostalAddress.from_record(rec["alias_address"]) if rec.get("alias_address") else None
        ),
        undeliverable=rec.get("undeliverable", False),
    )
