/** The address-manager page: create, list, revoke, look up, attribute.
 *
 * The page is a thin mirror of the server. Every state-changing button
 * issues exactly one API call and then re-fetches the list, so nothing
 * is ever shown that the server has not confirmed; reloading the page
 * reproduces the same state from scratch.
 */

import { AliasApi, ApiError, type AliasRecord, type Attribution } from "./api.js";
import {exportListJson, expiryLabel, formatAddress, formatLocalDate } from "./format.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

const FORM_FIELDS = [
  ["name", "Full name"],
  ["line1", "Street"],
  ["line2", "Unit (optional)"],
  ["city", "City"],
  ["state", "State"],
  ["zip", "ZIP"],
  ["merchant", "Merchant domain (optional)"],
] as const;

export class AddressManagerApp {
  private records: AliasRecord[] = [];
  private highlighted: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: AliasApi,
    private readonly locale?: string,
  ) {}

  /** Build the static skeleton and load the first server snapshot. */
  async init(): Promise<void> {
    this.root.replaceChildren();
    this.root.append(
      this.buildHeader(),
      el("div", { id: "notice", hidden: "" }),
      this.buildCreateForm(),
      this.buildLookup(),
      this.buildListSection(),
      this.buildAttributionSection(),
    );
    await this.refresh();
  }

  /** Re-fetch everything; the server is the only source of truth. */
  async refresh(): Promise<void> {
    try {
      const [records, attributions] = await Promise.all([
        this.api.listAliases(),
        this.api.allAttributions(),
      ]);
      this.records = records;
      this.renderList();
      this.renderAttributions(attributions);
      this.clearNotice();
    } catch (err) {
      this.showNotice(describeError(err), "error");
    }
  }

  // -- skeleton --------------------------------------------------------

  private buildHeader(): HTMLElement {
    const header = el("header");
    header.append(el("h1", {}, "Address manager"));
    const reload = el("button", { id: "reload" }, "Reload");
    reload.addEventListener("click", () => void this.refresh());
    header.append(reload);
    return header;
  }

  private buildCreateForm(): HTMLElement {
    const section = el("section", { id: "create" });
    section.append(el("h2", {}, "New alias"));
    const form = el("form", { id: "create-form" });
    for (const [field, label] of FORM_FIELDS) {
      const wrap = el("label", {}, label + " ");
      wrap.append(el("input", { name: field, id: `field-${field}` }));
      form.append(wrap);
    }
    const validity = el("label", {}, "Valid for days ");
    validity.append(
      el("input", { name: "validity", id: "field-validity", type: "number", min: "1" }),
    );
    form.append(validity);
    const subscription = el("label", {}, "Subscription (no expiry) ");
    subscription.append(
      el("input", { name: "subscription", id: "field-subscription", type: "checkbox" }),
    );
    form.append(subscription);
    form.append(el("button", { type: "submit", id: "create-submit" }, "Create alias"));
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.handleCreate();
    });
    section.append(form);
    return section;
  }

  private buildLookup(): HTMLElement {
    const section = el("section", { id: "lookup" });
    section.append(el("h2", {}, "Find by label short code"));
    const input = el("input", { id: "lookup-code", placeholder: "e.g. 4LLKQZH8" });
    const button = el("button", { id: "lookup-submit" }, "Find");
    button.addEventListener("click", () => void this.handleLookup());
    section.append(input, button);
    return section;
  }

  private buildListSection(): HTMLElement {
    const section = el("section", { id: "aliases" });
    section.append(el("h2", {}, "Your aliases"));
    const exportButton = el("button", { id: "export" }, "Export list");
    exportButton.addEventListener("click", () => this.handleExport());
    section.append(exportButton);
    section.append(el("div", { id: "alias-list" }));
    section.append(el("pre", { id: "export-output", hidden: "" }));
    return section;
  }

  private buildAttributionSection(): HTMLElement {
    const section = el("section", { id: "attributions" });
    section.append(el("h2", {}, "Leak attributions"));
    section.append(el("div", { id: "attribution-list" }));
    return section;
  }

  // -- rendering -------------------------------------------------------

  private renderList(): void {
    const host = this.root.querySelector("#alias-list") as HTMLElement;
    host.replaceChildren();
    if (this.records.length === 0) {
      host.append(el("p", { class: "empty" }, "No aliases yet."));
      return;
    }
    const table = el("table");
    const head = el("tr");
    for (const title of ["Alias", "Address", "Merchant", "Status", "Expires", "Short code", ""]) {
      head.append(el("th", {}, title));
    }
    table.append(head);
    for (const record of this.records) {
      const row = el("tr", { "data-alias": record.alias, "data-short-code": record.short_code });
      if (record.alias === this.highlighted) row.classList.add("highlight");
      row.append(el("td", { class: "digits" }, record.alias));
      const addr = el("td", { class: "address" });
      addr.append(el("pre", {}, formatAddress(record.alias_address)));
      row.append(addr);
      row.append(el("td", {}, record.merchant_domain ?? ""));
      const status = el("td");
      status.append(el("span", { class: `badge badge-${record.status.toLowerCase()}` }, record.status));
      row.append(status);
      row.append(el("td", {}, expiryLabel(record, this.locale)));
      row.append(el("td", { class: "short-code" }, record.short_code));
      const actions = el("td");
      if (record.status === "Issued" || record.status === "Active") {
        const revoke = el("button", { class: "revoke", "data-alias": record.alias }, "Revoke");
        revoke.addEventListener("click", () => void this.handleRevoke(record.alias));
        actions.append(revoke);
      }
      row.append(actions);
      table.append(row);
    }
    host.append(table);
  }

  private renderAttributions(attributions: Attribution[]): void {
    const host = this.root.querySelector("#attribution-list") as HTMLElement;
    host.replaceChildren();
    if (attributions.length === 0) {
      host.append(el("p", { class: "empty" }, "No leaks attributed."));
      return;
    }
    const table = el("table");
    const head = el("tr");
    for (const title of ["When", "Alias", "Issued to", "Mail from", "Alias was"]) {
      head.append(el("th", {}, title));
    }
    table.append(head);
    for (const item of attributions) {
      const row = el("tr");
      row.append(el("td", {}, formatLocalDate(item.at, this.locale)));
      row.append(el("td", { class: "digits" }, item.alias));
      row.append(el("td", {}, item.merchant_domain ?? "unknown"));
      row.append(el("td", {}, item.sender));
      row.append(el("td", {}, item.reason));
      table.append(row);
    }
    host.append(table);
  }

  // -- handlers --------------------------------------------------------

  private field(id: string): HTMLInputElement {
    return this.root.querySelector(`#field-${id}`) as HTMLInputElement;
  }

  private async handleCreate(): Promise<void> {
    const value = (id: string) => this.field(id).value.trim();
    const validityRaw = value("validity");
    try {
      await this.api.issueAlias({
        true_address: {
          name: value("name"),
          line1: value("line1"),
          line2: value("line2") || null,
          city: value("city"),
          state: value("state"),
          zip: value("zip"),
        },
        merchant_domain: value("merchant") || null,
        validity_days: validityRaw ? Number(validityRaw) : null,
        subscription: this.field("subscription").checked,
      });
    } catch (err) {
      this.showNotice(describeError(err), "error");
      return; // form keeps its values so the customer can correct them
    }
    (this.root.querySelector("#create-form") as HTMLFormElement).reset();
    await this.refresh();
  }

  private async handleRevoke(digits: string): Promise<void> {
    try {
      await this.api.revokeAlias(digits);
    } catch (err) {
      this.showNotice(describeError(err), "error");
      return;
    }
    await this.refresh();
  }

  private async handleLookup(): Promise<void> {
    const input = this.root.querySelector("#lookup-code") as HTMLInputElement;
    const code = input.value.trim().toUpperCase();
    if (!code) return;
    let found: AliasRecord | null;
    try {
      found = await this.api.findByShortCode(code);
    } catch (err) {
      this.showNotice(describeError(err), "error");
      return;
    }
    if (found === null) {
      this.highlighted = null;
      this.renderList();
      this.showNotice(`No alias carries short code ${code}.`, "info");
      return;
    }
    this.highlighted = found.alias;
    this.renderList();
    this.clearNotice();
  }

  private handleExport(): void {
    const output = this.root.querySelector("#export-output") as HTMLElement;
    output.textContent = exportListJson(this.records);
    output.removeAttribute("hidden");
  }

  // -- notices ---------------------------------------------------------

  private showNotice(text: string, kind: "error" | "info"): void {
    const notice = this.root.querySelector("#notice") as HTMLElement;
    notice.textContent = text;
    notice.className = `notice notice-${kind}`;
    notice.removeAttribute("hidden");
  }

  private clearNotice(): void {
    const notice = this.root.querySelector("#notice") as HTMLElement;
    notice.textContent = "";
    notice.setAttribute("hidden", "");
  }
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) return `Request failed (${err.status}): ${err.message}`;
  if (err instanceof Error) return `Could not reach the alias service: ${err.message}`;
  return String(err);
}

export function mount(root: HTMLElement, baseUrl: string): AddressManagerApp {
  const app = new AddressManagerApp(root, new AliasApi(baseUrl));
  void app.init();
  return app;
}
