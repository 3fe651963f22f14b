/** Display helpers: wire timestamps in, locale text out. */

import type { AliasRecord, WireAddress } from "./api.js";

export function formatAddress(addr: WireAddress): string {
  const lines = [addr.name, addr.line1];
  if (addr.line2) lines.push(addr.line2);
  lines.push(`${addr.city}, ${addr.state} ${addr.zip}`);
  return lines.join("\n");
}

export function formatLocalDate(iso: string | null, locale?: string): string {
  if (!iso) return "";
  const parsed = new Date(iso);
  if (Number.isNaN(parsed.getTime())) return iso;
  return parsed.toLocaleString(locale, {
    dateStyle: "medium",
    timeStyle: "short",
  });
}

/** When the alias stops working, as the customer should read it. */
export function expiryLabel(record: AliasRecord, locale?: string): string {
  if (record.subscription) return "subscription";
  if (record.expires_at) return formatLocalDate(record.expires_at, locale);
  if (record.validity_days != null) return `${record.validity_days} days after first use`;
  return "";
}

/** What a list row may carry into shared or exported views. */
export interface AliasListItem {
  alias: string;
  alias_address: WireAddress;
  merchant_domain: string | null;
  status: string;
  expires_at: string | null;
  subscription: boolean;
  short_code: string;
}

/** Strip a record down to its shareable fields; the true address never
 * leaves the create form. */
export function toListItem(record: AliasRecord): AliasListItem {
  return {
    alias: record.alias,
    alias_address: record.alias_address,
    merchant_domain: record.merchant_domain,
    status: record.status,
    expires_at: record.expires_at,
    subscription: record.subscription,
    short_code: record.short_code,
  };
}

export function exportListJson(records: AliasRecord[]): string {
  return JSON.stringify(records.map(toListItem), null, 2);
}
