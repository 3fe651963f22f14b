"""Alias address codec: 20-digit identities rendered as deliverable addresses.

An alias identity is 20 decimal digits split across the two street fields:

    street number (10 digits) = year_code (3) + payload[0:7]
    unit number   (10 digits) = payload[7:16] + check digit (1)

The year code is the issuance year mod 1000; the 16-digit payload is random;
the final digit is a Luhn mod-10 check digit over year_code + payload, which
detects every single-digit transcription error in the covered 19 digits.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .postal import MAX_FIELD_LEN, BadZip, FieldTooLong, PostalAddress

DIGITS_TOTAL = 20
DIGITS_YEAR = 3
DIGITS_CHECK = 1
DIGITS_PAYLOAD = 16

_ZIP = re.compile(r"\d{5}")


class CodecError(ValueError):
    """Base class for alias encoding/decoding failures."""


class NonDigitInput(CodecError):
    pass


class BadPayloadLength(CodecError):
    pass


class ChecksumMismatch(CodecError):
    """Alias-shaped address whose check digit is wrong: a transcription error."""


def checksum(digits: str) -> int:
    """Luhn mod-10 check digit for a decimal-digit string.

    Returns the digit d such that digits + str(d) passes `luhn_valid`.
    """
    if not digits or not digits.isdigit():
        raise NonDigitInput(f"checksum input must be nonempty decimal digits, got {digits!r}")
    total = 0
    # With the check digit appended at the right, these positions fall on the
    # doubled slots of the Luhn sum.
    for i, ch in enumerate(reversed(digits)):
        d = int(ch)
        if i % 2 == 0:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return (10 - total % 10) % 10


def luhn_valid(digits: str) -> bool:
    """Validate a digit string whose last character is the check digit."""
    if not digits or not digits.isdigit():
        raise NonDigitInput(f"luhn input must be nonempty decimal digits, got {digits!r}")
    total = 0
    for i, ch in enumerate(reversed(digits)):
        d = int(ch)
        if i % 2 == 1:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return total % 10 == 0


@dataclass(frozen=True, slots=True)
class AliasCode:
    """The numeric identity of an alias address."""

    zip_code: str
    year_code: str  # 3 digits, issuance year mod 1000
    payload: str  # 16 random digits
    check_digit: str  # 1 Luhn digit over year_code + payload

    @property
    def digits(self) -> str:
        """The full 20-digit identity."""
        return self.year_code + self.payload + self.check_digit

    @property
    def street_number(self) -> str:
        return self.digits[:10]

    @property
    def unit_number(self) -> str:
        return self.digits[10:]


def make_alias_code(zip_code: str, year: int, payload: str) -> AliasCode:
    """Assemble an AliasCode, computing the year code and check digit."""
    if not _ZIP.fullmatch(zip_code):
        raise BadZip(f"ZIP must be exactly 5 digits, got {zip_code!r}")
    if not payload.isdigit():
        raise NonDigitInput(f"payload must be decimal digits, got {payload!r}")
    if len(payload) != DIGITS_PAYLOAD:
        raise BadPayloadLength(
            f"payload must be exactly {DIGITS_PAYLOAD} digits, got {len(payload)}"
        )
    year_code = f"{year % 1000:03d}"
    check = checksum(year_code + payload)
    return AliasCode(zip_code=zip_code, year_code=year_code, payload=payload, check_digit=str(check))


def from_digits(zip_code: str, digits: str) -> AliasCode:
    """Rebuild an AliasCode from its 20-digit identity, verifying the checksum."""
    if not digits.isdigit():
        raise NonDigitInput(f"alias digits must be decimal, got {digits!r}")
    if len(digits) != DIGITS_TOTAL:
        raise BadPayloadLength(f"alias identity must be {DIGITS_TOTAL} digits, got {len(digits)}")
    year_code, payload, check = digits[:3], digits[3:19], digits[19]
    if checksum(year_code + payload) != int(check):
        raise ChecksumMismatch(f"check digit mismatch in alias digits {digits}")
    return AliasCode(zip_code=zip_code, year_code=year_code, payload=payload, check_digit=check)


@dataclass(frozen=True, slots=True)
class AliasAddressTemplate:
    """Text the carrier wraps around the 20 digits.

    Defaults follow the "ABC Alias / <10 digits> Alias Way / Unit <10 digits>"
    shape. Construction fails if any template string would push a rendered
    field past the 30-character carrier limit.
    """

    carrier_name: str = "ABC Alias"
    street_suffix: str = "Alias Way"
    unit_prefix: str = "Unit"

    def __post_init__(self) -> None:
        # 10 digits plus one separating space in each line.
        budgets = {
            "carrier_name": len(self.carrier_name),
            "street_suffix": 10 + 1 + len(self.street_suffix),
            "unit_prefix": len(self.unit_prefix) + 1 + 10,
        }
        for field_name, used in budgets.items():
            if used > MAX_FIELD_LEN:
                raise FieldTooLong(
                    f"template {field_name} renders to {used} characters, limit is {MAX_FIELD_LEN}"
                )

    def line1_pattern(self) -> re.Pattern:
        return re.compile(rf"(\d{{10}}) {re.escape(self.street_suffix)}", re.IGNORECASE)

    def line2_pattern(self) -> re.Pattern:
        return re.compile(rf"{re.escape(self.unit_prefix)} (\d{{10}})", re.IGNORECASE)


def render(code: AliasCode, template: AliasAddressTemplate, city: str, state: str) -> PostalAddress:
    """Render an alias code as a deliverable address.

    City, state, and ZIP are copied from the customer's true address so that
    shippability rules and merchant pricing estimates stay accurate.
    """
    return PostalAddress(
        name=template.carrier_name,
        line1=f"{code.street_number} {template.street_suffix}",
        line2=f"{template.unit_prefix} {code.unit_number}",
        city=city,
        state=state,
        zip_code=code.zip_code,
    )


def parse(addr: PostalAddress, template: AliasAddressTemplate) -> AliasCode | None:
    """Extract the alias identity from an address, or None for ordinary mail.

    Returns None when the address does not match the alias shape. Raises
    ChecksumMismatch when the shape matches but the check digit is wrong,
    which signals a transcription error rather than an ordinary address.
    """
    m1 = template.line1_pattern().fullmatch(addr.line1)
    m2 = template.line2_pattern().fullmatch(addr.line2 or "")
    if not (m1 and m2):
        return None
    return from_digits(addr.zip_code, m1.group(1) + m2.group(1))


@dataclass(frozen=True, slots=True)
class NamespaceConfig:
    """Digit-budget arithmetic for the per-ZIP alias namespace."""

    digits_total: int = DIGITS_TOTAL
    digits_year: int = DIGITS_YEAR
    digits_check: int = DIGITS_CHECK
    digits_payload: int = DIGITS_PAYLOAD

    def __post_init__(self) -> None:
        if self.digits_year + self.digits_check + self.digits_payload != self.digits_total:
            raise CodecError(
                "digit budget mismatch: year + check + payload must equal total"
            )

    @property
    def capacity_per_zip_year(self) -> int:
        """New aliases available per ZIP per year: one per random payload."""
        return 10**self.digits_payload

    @property
    def address_space_per_zip(self) -> int:
        """All possible alias identities in one ZIP across years."""
        return 10**self.digits_total
