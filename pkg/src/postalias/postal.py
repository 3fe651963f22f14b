"""US-format postal addresses: normalization, field limits, and canonical keys."""

from __future__ import annotations

import re
from dataclasses import dataclass

# Every major US carrier accepts at least 30 characters for the name and
# address lines, so the alias format budgets against this limit.
MAX_FIELD_LEN = 30

# 50 states, DC, territories, and armed-forces codes.
US_STATE_CODES = frozenset(
    """
    AL AK AZ AR CA CO CT DE FL GA HI ID IL IN IA KS KY LA ME MD MA MI MN MS
    MO MT NE NV NH NJ NM NY NC ND OH OK OR PA RI SC SD TN TX UT VT VA WA WV
    WI WY DC PR VI GU AS MP AA AE AP
    """.split()
)

_WS = re.compile(r"\s+")
_ZIP = re.compile(r"\d{5}")


class AddressError(ValueError):
    """Base class for address normalization failures."""


class MissingField(AddressError):
    pass


class FieldTooLong(AddressError):
    pass


class BadState(AddressError):
    pass


class BadZip(AddressError):
    pass


def _clean(text: str) -> str:
    """Trim and collapse internal whitespace runs to single spaces."""
    return _WS.sub(" ", text.strip())


@dataclass(frozen=True, slots=True)
class PostalAddress:
    """A normalized US mailing address.

    Instances should be built through :func:`normalize` (or
    :meth:`from_record`), which enforces the field invariants. `line2` is
    ``None`` when the address has no second line; an empty string is
    canonicalized to ``None``.
    """

    name: str
    line1: str
    line2: str | None
    city: str
    state: str
    zip_code: str

    def to_record(self) -> dict:
        """Flat key-value record used by fixtures and the service API."""
        return {
            "name": self.name,
            "line1": self.line1,
            "line2": self.line2,
            "city": self.city,
            "state": self.state,
            "zip": self.zip_code,
        }

    @classmethod
    def from_record(cls, record: dict) -> "PostalAddress":
        """Parse a flat record, normalizing on the way in."""
        return normalize(
            record.get("name"),
            record.get("line1"),
            record.get("line2"),
            record.get("city"),
            record.get("state"),
            record.get("zip"),
        )

    def display(self) -> str:
        """Multi-line label rendering."""
        lines = [self.name, self.line1]
        if self.line2:
            lines.append(self.line2)
        lines.append(f"{self.city}, {self.state} {self.zip_code}")
        return "\n".join(lines)


def normalize(
    name: str | None,
    line1: str | None,
    line2: str | None,
    city: str | None,
    state: str | None,
    zip_code: str | None,
) -> PostalAddress:
    """Normalize raw address fields into a valid :class:`PostalAddress`.

    Trims and single-spaces every field, uppercases the state and ZIP, and
    enforces the per-field invariants. Letter case of name/lines/city is
    preserved; abbreviation expansion is deliberately not attempted so that
    downstream matching stays exact and deterministic.

    Raises:
        MissingField: a required field is absent or blank.
        FieldTooLong: name/line1/line2 exceeds 30 characters after cleaning.
        BadState: not a US state or territory code.
        BadZip: not exactly 5 decimal digits.
    """
    required = {"name": name, "line1": line1, "city": city, "state": state, "zip": zip_code}
    for field_name, value in required.items():
        if value is None or not str(value).strip():
            raise MissingField(f"missing required address field: {field_name}")

    name = _clean(str(name))
    line1 = _clean(str(line1))
    city = _clean(str(city))
    line2_clean = _clean(str(line2)) if line2 is not None else ""
    for field_name, value in (("name", name), ("line1", line1), ("line2", line2_clean)):
        if len(value) > MAX_FIELD_LEN:
            raise FieldTooLong(
                f"{field_name} is {len(value)} characters, limit is {MAX_FIELD_LEN}"
            )

    state = _clean(str(state)).upper()
    if state not in US_STATE_CODES:
        raise BadState(f"unknown state/territory code: {state!r}")

    zip_clean = _clean(str(zip_code))
    if not _ZIP.fullmatch(zip_clean):
        raise BadZip(f"ZIP must be exactly 5 digits, got {zip_clean!r}")

    return PostalAddress(
        name=name,
        line1=line1,
        line2=line2_clean or None,
        city=city,
        state=state,
        zip_code=zip_clean,
    )


def is_normalized(addr: PostalAddress) -> bool:
    """True when the address equals its own normalization."""
    try:
        return normalize(
            addr.name, addr.line1, addr.line2, addr.city, addr.state, addr.zip_code
        ) == addr
    except AddressError:
        return False


def address_key(addr: PostalAddress) -> str:
    """Canonical join key for an address.

    Case and internal whitespace differences collapse to the same key, so the
    key can be used for equality joins (validation lookup, data-coupling
    counts) without further cleanup.
    """
    parts = (
        addr.name,
        addr.line1,
        addr.line2 or "",
        addr.city,
        addr.state,
        addr.zip_code,
    )
    return "|".join(_clean(p).casefold() for p in parts)
