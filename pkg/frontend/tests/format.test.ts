import { describe, expect, it } from "vitest";

import type { AliasRecord } from "../src/api.js";
import { exportListJson, expiryLabel, formatAddress, formatLocalDate, toListItem } from "../src/format.js";

const BASE: AliasRecord = {
  alias: "02520055634949881895",
  zip: "12345",
  status: "Issued",
  alias_address: {
    name: "ABC Alias",
    line1: "0252005563 Alias Way",
    line2: "Unit 4949881895",
    city: "Any Town",
    state: "NY",
    zip: "12345",
  },
  true_address: {
    name: "John Smith",
    line1: "123 Main Street",
    line2: "Unit 456",
    city: "Any Town",
    state: "NY",
    zip: "12345",
  },
  issued_at: "2025-06-01T12:00:00+00:00",
  first_used_at: null,
  expires_at: null,
  validity_days: 30,
  subscription: false,
  merchant_domain: "shop.example",
  short_code: "2A9RPW4F",
};

describe("formatAddress", () => {
  it("renders four lines with the unit present", () => {
    expect(formatAddress(BASE.alias_address)).toBe(
      "ABC Alias\n0252005563 Alias Way\nUnit 4949881895\nAny Town, NY 12345",
    );
  });

  it("skips a missing unit line", () => {
    expect(formatAddress({ ...BASE.alias_address, line2: null })).toBe(
      "ABC Alias\n0252005563 Alias Way\nAny Town, NY 12345",
    );
  });
});

describe("formatLocalDate", () => {
  it("localizes wire timestamps", () => {
    const text = formatLocalDate("2025-06-01T12:00:00+00:00", "en-US");
    expect(text).toContain("2025");
    expect(text).toContain("Jun");
  });

  it("passes through unparseable input and blanks nulls", () => {
    expect(formatLocalDate("soon", "en-US")).toBe("soon");
    expect(formatLocalDate(null)).toBe("");
  });
});

describe("expiryLabel", () => {
  it("prefers the concrete expiry timestamp", () => {
    const record = { ...BASE, expires_at: "2025-07-01T12:00:00+00:00" };
    expect(expiryLabel(record, "en-US")).toContain("Jul");
  });

  it("falls back to the validity window before first use", () => {
    expect(expiryLabel(BASE, "en-US")).toBe("30 days after first use");
  });

  it("marks subscriptions as such", () => {
    const record = { ...BASE, subscription: true, validity_days: null };
    expect(expiryLabel(record, "en-US")).toBe("subscription");
  });
});

describe("export", () => {
  it("keeps the shareable fields", () => {
    const item = toListItem(BASE);
    expect(item).toMatchObject({
      alias: BASE.alias,
      merchant_domain: "shop.example",
      status: "Issued",
      short_code: "2A9RPW4F",
    });
  });

  it("never includes the true address", () => {
    const json = exportListJson([BASE, { ...BASE, alias: "02520055634949881896" }]);
    expect(json).toContain("Alias Way");
    expect(json).not.toContain("true_address");
    expect(json).not.toContain("Main Street");
    expect(json).not.toContain("John Smith");
  });
});
