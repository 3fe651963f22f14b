/** Typed client for the carrier's alias HTTP API.
 *
 * Every method performs exactly one request against one documented
 * endpoint; there is no client-side caching or retry, so whatever the
 * caller renders is whatever the server just said.
 */

export interface WireAddress {
  name: string;
  line1: string;
  line2: string | null;
  city: string;
  state: string;
  zip: string;
}

export type AliasStatus = "Issued" | "Active" | "Expired" | "Revoked";

export interface AliasRecord {
  alias: string;
  zip: string;
  status: AliasStatus;
  alias_address: WireAddress;
  true_address: WireAddress;
  issued_at: string;
  first_used_at: string | null;
  expires_at: string | null;
  validity_days: number | null;
  subscription: boolean;
  merchant_domain: string | null;
  short_code: string;
}

export interface Attribution {
  at: string;
  alias: string;
  merchant_domain: string | null;
  sender: string;
  reason: string;
}

export interface IssueRequest {
  true_address: WireAddress;
  merchant_domain?: string | null;
  validity_days?: number | null;
  subscription?: boolean;
}

export interface Health {
  status: string;
  aliases: number;
  parcels: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseError(response: Response): Promise<ApiError> {
  let detail = `${response.status} ${response.statusText}`;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
    else if (body.detail !== undefined) detail = JSON.stringify(body.detail);
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(response.status, detail);
}

export class AliasApi {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  health(): Promise<Health> {
    return this.request<Health>("GET", "/health");
  }

  async listAliases(): Promise<AliasRecord[]> {
    const body = await this.request<{ aliases: AliasRecord[] }>("GET", "/aliases");
    return body.aliases;
  }

  /** GET /aliases?short_code= — resolves to null when nothing matches. */
  async findByShortCode(code: string): Promise<AliasRecord | null> {
    try {
      return await this.request<AliasRecord>(
        "GET",
        `/aliases?short_code=${encodeURIComponent(code)}`,
      );
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }

  issueAlias(body: IssueRequest): Promise<AliasRecord> {
    return this.request<AliasRecord>("POST", "/aliases", body);
  }

  revokeAlias(digits: string): Promise<AliasRecord> {
    return this.request<AliasRecord>("POST", `/aliases/${digits}/revoke`);
  }

  changeValidity(digits: string, validityDays: number): Promise<AliasRecord> {
    return this.request<AliasRecord>("POST", `/aliases/${digits}/validity`, {
      validity_days: validityDays,
    });
  }

  async attributionsFor(digits: string): Promise<Attribution[]> {
    const body = await this.request<{ attributions: Attribution[] }>(
      "GET",
      `/aliases/${digits}/attribution`,
    );
    return body.attributions;
  }

  async allAttributions(): Promise<Attribution[]> {
    const body = await this.request<{ attributions: Attribution[] }>("GET", "/attributions");
    return body.attributions;
  }
}
