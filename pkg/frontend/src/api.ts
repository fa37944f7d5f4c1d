// Thin client for the local advisor service. Keeps the raw response text
// so the UI can display server numbers verbatim.

import type { AdviceResponse, ApiError, AssassinViewWire, Violation } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface AdviceResult {
  raw: string; // exact response body, for the parity panel
  parsed: AdviceResponse;
}

export class AdvisorError extends Error {
  constructor(
    public readonly status: number,
    message: string,
    public readonly field: string = "",
  ) {
    super(message);
  }
}

export class AdvisorClient {
  private adviceInFlight = false;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async post(path: string, body: unknown): Promise<Response> {
    return this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async health(): Promise<{ status: string; model: unknown }> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/v1/health`);
    if (!resp.ok) throw new AdvisorError(resp.status, `health check failed (${resp.status})`);
    return resp.json();
  }

  async validate(view: AssassinViewWire): Promise<Violation[]> {
    const resp = await this.post("/api/v1/validate", view);
    const body = await resp.json();
    if (!resp.ok) {
      const err = body as ApiError;
      throw new AdvisorError(resp.status, err.error, err.field);
    }
    return body.violations as Violation[];
  }

  /** At most one advice request in flight; extra clicks are rejected. */
  async advise(view: AssassinViewWire): Promise<AdviceResult> {
    if (this.adviceInFlight) {
      throw new AdvisorError(0, "advice request already in flight");
    }
    this.adviceInFlight = true;
    try {
      const resp = await this.post("/api/v1/advise", view);
      const raw = await resp.text();
      if (!resp.ok) {
        const err = JSON.parse(raw) as ApiError;
        throw new AdvisorError(resp.status, err.error, err.field);
      }
      return { raw, parsed: JSON.parse(raw) as AdviceResponse };
    } finally {
      this.adviceInFlight = false;
    }
  }
}
