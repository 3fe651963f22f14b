"""Authoritative alias registry: issuance, lifecycle, retention, attribution.

The registry owns the alias namespace. Issuance draws a random 16-digit
payload and performs an atomic check-and-insert against the per-(ZIP, year)
ledger, so a payload can never be observed twice within one namespace cell.
Lifecycle transitions run under a single lock, making every operation
linearizable per record. Clocks are always explicit `now` parameters; the
registry never reads ambient time.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path

from . import postal
from .codec import AliasAddressTemplate, AliasCode, make_alias_code, render
from .eventlog import EventLog, read_events
from .postal import PostalAddress

# 32-symbol alphabet without the look-alikes 0/O and 1/I.
SHORT_CODE_ALPHABET = "23456789ABCDEFGHJKLMNPQRSTUVWXYZ"
SHORT_CODE_LEN = 8

DEFAULT_VALIDITY_DAYS = 30

# Redraw budget before declaring the (zip, year) namespace pathologically
# full. At realistic fill rates even one redraw is vanishingly unlikely.
MAX_PAYLOAD_REDRAWS = 8


class AliasStatus(Enum):
    ISSUED = "Issued"
    ACTIVE = "Active"
    EXPIRED = "Expired"
    REVOKED = "Revoked"


TERMINAL_STATUSES = frozenset({AliasStatus.EXPIRED, AliasStatus.REVOKED})

ALLOWED_TRANSITIONS = frozenset(
    {
        (AliasStatus.ISSUED, AliasStatus.ACTIVE),
        (AliasStatus.ISSUED, AliasStatus.REVOKED),
        (AliasStatus.ACTIVE, AliasStatus.EXPIRED),
        (AliasStatus.ACTIVE, AliasStatus.REVOKED),
    }
)


class Refusal(Enum):
    """Why resolution declined to hand out a true address.

    Refusals are ordinary return values, not exceptions: the relay return
    path branches on them.
    """

    EXPIRED = "Expired"
    REVOKED = "Revoked"
    NOT_FOUND = "NotFound"


class RegistryError(Exception):
    pass


class NotFound(RegistryError):
    pass


class TerminalState(RegistryError):
    pass


class NamespaceExhausted(RegistryError):
    pass


class InvalidAddress(RegistryError):
    pass


@dataclass(slots=True)
class AliasRecord:
    """Registry entry binding an alias to a true address."""

    alias_code: AliasCode
    alias_address: PostalAddress
    true_address: PostalAddress
    status: AliasStatus
    issued_at: datetime
    first_used_at: datetime | None
    validity_days: int | None
    subscription: bool
    merchant_domain: str | None
    short_code: str

    @property
    def digits(self) -> str:
        return self.alias_code.digits

    def expires_at(self) -> datetime | None:
        """End of the validity window, once the clock starts at first use."""
        if self.subscription or self.validity_days is None or self.first_used_at is None:
            return None
        return self.first_used_at + timedelta(days=self.validity_days)

    def to_record(self) -> dict:
        expires = self.expires_at()
        return {
            "alias": self.digits,
            "zip": self.alias_code.zip_code,
            "status": self.status.value,
            "alias_address": self.alias_address.to_record(),
            "true_address": self.true_address.to_record(),
            "issued_at": self.issued_at.isoformat(),
            "first_used_at": self.first_used_at.isoformat() if self.first_used_at else None,
            "expires_at": expires.isoformat() if expires else None,
            "validity_days": self.validity_days,
            "subscription": self.subscription,
            "merchant_domain": self.merchant_domain,
            "short_code": self.short_code,
        }


def _code_from_digits(zip_code: str, digits: str) -> AliasCode:
    return AliasCode(
        zip_code=zip_code,
        year_code=digits[:3],
        payload=digits[3:19],
        check_digit=digits[19],
    )


class AliasRegistry:
    """Shared service object holding every alias binding.

    All mutation happens under one lock; readers that may transition state
    (resolve performs first-use activation and lazy expiry) take the same
    lock, so no duplicate payload or illegal transition is ever observable.
    """

    def __init__(
        self,
        template: AliasAddressTemplate | None = None,
        *,
        default_validity_days: int = DEFAULT_VALIDITY_DAYS,
        rng: random.Random | int | None = None,
        log_path: str | Path | None = None,
    ):
        self.template = template or AliasAddressTemplate()
        self.default_validity_days = default_validity_days
        if isinstance(rng, random.Random):
            self._rng = rng
        else:
            self._rng = random.Random(rng)
        self._records: dict[str, AliasRecord] = {}
        self._ledger: dict[tuple[str, str], set[str]] = {}
        self._short_codes: dict[str, str] = {}
        self._lock = threading.Lock()
        self._log = EventLog(log_path) if log_path is not None else None

    # -- construction from a persisted log ---------------------------------

    @classmethod
    def replay(
        cls,
        log_path: str | Path,
        template: AliasAddressTemplate | None = None,
        **kwargs,
    ) -> "AliasRegistry":
        """Rebuild registry state from an event log, then append to it."""
        reg = cls(template, log_path=None, **kwargs)
        for event in read_events(log_path):
            reg._apply(event)
        reg._log = EventLog(log_path)
        return reg

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "issued":
            code = _code_from_digits(event["zip"], event["alias"])
            record = AliasRecord(
                alias_code=code,
                alias_address=PostalAddress.from_record(event["alias_address"]),
                true_address=PostalAddress.from_record(event["true_address"]),
                status=AliasStatus.ISSUED,
                issued_at=datetime.fromisoformat(event["at"]),
                first_used_at=None,
                validity_days=event["validity_days"],
                subscription=event["subscription"],
                merchant_domain=event["merchant_domain"],
                short_code=event["short_code"],
            )
            self._insert(record)
        elif kind == "first_use":
            record = self._records[event["alias"]]
            record.status = AliasStatus.ACTIVE
            record.first_used_at = datetime.fromisoformat(event["at"])
        elif kind == "expired":
            self._records[event["alias"]].status = AliasStatus.EXPIRED
        elif kind == "revoked":
            self._records[event["alias"]].status = AliasStatus.REVOKED
        elif kind == "purged":
            self._remove(event["alias"])
        elif kind == "validity_changed":
            self._records[event["alias"]].validity_days = event["validity_days"]
        else:
            raise ValueError(f"unknown event type in log: {kind!r}")

    def export_events(self, path: str | Path) -> int:
        """Write a fresh event stream equivalent to the current state."""
        out = EventLog(path)
        count = 0
        with self._lock:
            for record in self._records.values():
                out.append(self._issued_event(record))
                count += 1
                if record.first_used_at is not None:
                    out.append(
                        {
                            "event": "first_use",
                            "at": record.first_used_at.isoformat(),
                            "alias": record.digits,
                        }
                    )
                    count += 1
                if record.status in TERMINAL_STATUSES:
                    out.append(
                        {
                            "event": record.status.value.lower(),
                            "at": record.issued_at.isoformat(),
                            "alias": record.digits,
                        }
                    )
                    count += 1
        out.close()
        return count

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None

    # -- internal state helpers --------------------------------------------

    def _insert(self, record: AliasRecord) -> None:
        key = (record.alias_code.zip_code, record.alias_code.year_code)
        self._ledger.setdefault(key, set()).add(record.alias_code.payload)
        self._records[record.digits] = record
        self._short_codes[record.short_code] = record.digits

    def _remove(self, digits: str) -> None:
        record = self._records.pop(digits, None)
        if record is None:
            return
        key = (record.alias_code.zip_code, record.alias_code.year_code)
        self._ledger.get(key, set()).discard(record.alias_code.payload)
        if self._short_codes.get(record.short_code) == digits:
            del self._short_codes[record.short_code]

    def _emit(self, event: dict) -> None:
        if self._log is not None:
            self._log.append(event)

    @staticmethod
    def _issued_event(record: AliasRecord) -> dict:
        return {
            "event": "issued",
            "at": record.issued_at.isoformat(),
            "alias": record.digits,
            "zip": record.alias_code.zip_code,
            "alias_address": record.alias_address.to_record(),
            "true_address": record.true_address.to_record(),
            "merchant_domain": record.merchant_domain,
            "validity_days": record.validity_days,
            "subscription": record.subscription,
            "short_code": record.short_code,
        }

    def _digits_of(self, alias: AliasCode | str) -> str:
        return alias if isinstance(alias, str) else alias.digits

    def _require(self, alias: AliasCode | str) -> AliasRecord:
        record = self._records.get(self._digits_of(alias))
        if record is None:
            raise NotFound(f"no alias on record for {self._digits_of(alias)}")
        return record

    def _transition(self, record: AliasRecord, to: AliasStatus, now: datetime) -> None:
        if (record.status, to) not in ALLOWED_TRANSITIONS:
            raise TerminalState(
                f"alias {record.digits} cannot move {record.status.value} -> {to.value}"
            )
        record.status = to
        if to is AliasStatus.ACTIVE:
            record.first_used_at = now
        self._emit({"event": to.value.lower() if to is not AliasStatus.ACTIVE else "first_use",
                    "at": now.isoformat(), "alias": record.digits})

    @staticmethod
    def _window_elapsed(record: AliasRecord, now: datetime) -> bool:
        expires = record.expires_at()
        return expires is not None and now > expires

    def _draw_payload(self, cell: set[str]) -> str:
        for _ in range(1 + MAX_PAYLOAD_REDRAWS):
            payload = f"{self._rng.randrange(10**16):016d}"
            if payload not in cell:
                return payload
        raise NamespaceExhausted(
            f"gave up after {MAX_PAYLOAD_REDRAWS} redraws; namespace cell pathologically full"
        )

    def _draw_short_code(self) -> str:
        while True:
            code = "".join(self._rng.choices(SHORT_CODE_ALPHABET, k=SHORT_CODE_LEN))
            bound = self._short_codes.get(code)
            if bound is None:
                return code
            # Codes bound to terminal records may be reassigned; live ones may not.
            if self._records[bound].status in TERMINAL_STATUSES:
                return code

    # -- operations ----------------------------------------------------------

    def issue(
        self,
        true_address: PostalAddress,
        *,
        merchant_domain: str | None = None,
        validity_days: int | None = None,
        subscription: bool = False,
        now: datetime,
    ) -> AliasRecord:
        """Issue a fresh alias bound to `true_address`.

        The alias shares the true address's city/state/ZIP; the payload is
        drawn uniformly and check-and-inserted into the namespace ledger.
        Ownership of the true address is asserted by the caller; nothing
        here verifies that the requester actually lives there.
        """
        with self._lock:
            record = self._issue_locked(
                true_address,
                merchant_domain=merchant_domain,
                validity_days=validity_days,
                subscription=subscription,
                now=now,
            )
            self._emit(self._issued_event(record))
            return record

    def _issue_locked(
        self,
        true_address: PostalAddress,
        *,
        merchant_domain: str | None,
        validity_days: int | None,
        subscription: bool,
        now: datetime,
    ) -> AliasRecord:
        if not postal.is_normalized(true_address):
            raise InvalidAddress(f"true address fails normalization invariants: {true_address!r}")
        if validity_days is not None and validity_days <= 0:
            raise InvalidAddress(f"validity_days must be positive, got {validity_days}")
        zip_code = true_address.zip_code
        year_code = f"{now.year % 1000:03d}"
        cell = self._ledger.setdefault((zip_code, year_code), set())
        payload = self._draw_payload(cell)
        code = make_alias_code(zip_code, now.year, payload)
        record = AliasRecord(
            alias_code=code,
            alias_address=render(code, self.template, true_address.city, true_address.state),
            true_address=true_address,
            status=AliasStatus.ISSUED,
            issued_at=now,
            first_used_at=None,
            validity_days=None if subscription else (validity_days or self.default_validity_days),
            subscription=subscription,
            merchant_domain=merchant_domain,
            short_code=self._draw_short_code(),
        )
        self._insert(record)
        return record

    def issue_batch(
        self,
        true_address: PostalAddress,
        n: int,
        *,
        merchant_domain: str | None = None,
        validity_days: int | None = None,
        subscription: bool = False,
        now: datetime,
    ) -> list[AliasRecord]:
        """Issue `n` aliases at once for later use. All-or-nothing."""
        with self._lock:
            issued: list[AliasRecord] = []
            try:
                for _ in range(n):
                    issued.append(
                        self._issue_locked(
                            true_address,
                            merchant_domain=merchant_domain,
                            validity_days=validity_days,
                            subscription=subscription,
                            now=now,
                        )
                    )
            except RegistryError:
                for record in issued:
                    self._remove(record.digits)
                raise
            for record in issued:
                self._emit(self._issued_event(record))
            return issued

    def mark_first_use(self, alias: AliasCode | str, now: datetime) -> AliasRecord:
        """Start the validity clock. Idempotent once the alias is Active."""
        with self._lock:
            record = self._require(alias)
            if record.status is AliasStatus.ACTIVE:
                return record
            self._transition(record, AliasStatus.ACTIVE, now)
            return record

    def sweep_expiry(self, now: datetime) -> int:
        """Expire every Active, non-subscription record past its window."""
        count = 0
        with self._lock:
            for record in self._records.values():
                if record.status is AliasStatus.ACTIVE and self._window_elapsed(record, now):
                    self._transition(record, AliasStatus.EXPIRED, now)
                    count += 1
        return count

    def revoke(self, alias: AliasCode | str, now: datetime) -> AliasRecord:
        with self._lock:
            record = self._require(alias)
            self._transition(record, AliasStatus.REVOKED, now)
            return record

    def resolve(self, alias: AliasCode | str, now: datetime) -> PostalAddress | Refusal:
        """Map an alias to its true address, or say why not.

        A successful resolution of an Issued alias marks first use. Expiry is
        checked lazily here as well as by `sweep_expiry`, so correctness does
        not depend on background timers.
        """
        with self._lock:
            record = self._records.get(self._digits_of(alias))
            if record is None:
                return Refusal.NOT_FOUND
            if record.status is AliasStatus.ACTIVE and self._window_elapsed(record, now):
                self._transition(record, AliasStatus.EXPIRED, now)
            if record.status is AliasStatus.EXPIRED:
                return Refusal.EXPIRED
            if record.status is AliasStatus.REVOKED:
                return Refusal.REVOKED
            if record.status is AliasStatus.ISSUED:
                self._transition(record, AliasStatus.ACTIVE, now)
            return record.true_address

    def is_live(self, alias: AliasCode | str, now: datetime) -> bool:
        """Non-mutating: would `resolve` return an address right now?"""
        with self._lock:
            record = self._records.get(self._digits_of(alias))
            if record is None:
                return False
            if record.status is AliasStatus.ISSUED:
                return True
            return record.status is AliasStatus.ACTIVE and not self._window_elapsed(record, now)

    def lookup(self, alias: AliasCode | str) -> AliasRecord:
        """Fetch the record for an alias identity. Raises NotFound."""
        with self._lock:
            return self._require(alias)

    def get(self, alias: AliasCode | str) -> AliasRecord | None:
        with self._lock:
            return self._records.get(self._digits_of(alias))

    def lookup_by_short_code(self, code: str) -> AliasRecord:
        """Exact-match lookup by the short code printed on the relabel."""
        with self._lock:
            digits = self._short_codes.get(code)
            if digits is None:
                raise NotFound(f"no alias bound to short code {code!r}")
            return self._records[digits]

    def attribute_leak(self, alias: AliasCode | str) -> str | None:
        """Which merchant was this alias registered for? None means unknown."""
        with self._lock:
            return self._require(alias).merchant_domain

    def update_validity(self, alias: AliasCode | str, validity_days: int, now: datetime) -> AliasRecord:
        """Adjust the validity window of a live alias."""
        if validity_days <= 0:
            raise InvalidAddress(f"validity_days must be positive, got {validity_days}")
        with self._lock:
            record = self._require(alias)
            if record.status in TERMINAL_STATUSES:
                raise TerminalState(f"alias {record.digits} is {record.status.value}")
            record.validity_days = validity_days
            self._emit(
                {
                    "event": "validity_changed",
                    "at": now.isoformat(),
                    "alias": record.digits,
                    "validity_days": validity_days,
                }
            )
            return record

    def retention_sweep(self, current_year: int) -> int:
        """Purge non-Active records from past years.

        The namespace only needs the current year's aliases (any state) plus
        still-Active aliases from earlier years, so everything else is
        dropped from the ledger and the record store.
        """
        current = f"{current_year % 1000:03d}"
        purged = 0
        with self._lock:
            stale = [
                record.digits
                for record in self._records.values()
                if record.alias_code.year_code != current
                and record.status is not AliasStatus.ACTIVE
            ]
            for digits in stale:
                self._remove(digits)
                self._emit({"event": "purged", "alias": digits})
                purged += 1
        return purged

    # -- introspection -------------------------------------------------------

    def records(self) -> list[AliasRecord]:
        with self._lock:
            return list(self._records.values())

    def __len__(self) -> int:
        return len(self._records)

    def payloads_in(self, zip_code: str, year: int) -> set[str]:
        """Snapshot of the issued payload set for one namespace cell."""
        with self._lock:
            return set(self._ledger.get((zip_code, f"{year % 1000:03d}"), set()))
