import {
  ContextGraph,
  Decision,
  ErrorEnvelope,
  Pack,
  PackState,
  TraceChain,
  ValidationReport,
} from "./schemas.js";
import { z } from "zod";

/** A service failure, carrying the envelope's code verbatim. */
export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly detail: unknown,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Human-readable phrasing for error codes the UI expects to encounter. */
export function describeError(error: ApiError): string {
  switch (error.code) {
    case "level_view_mismatch":
      return "This entity's hierarchy level does not support the selected axis. Pick a compatible entity or switch the axis.";
    case "missing_justification":
      return "A justification is required before a verdict can be recorded.";
    case "missing_curator":
      return "No curator identity is set; sign in before recording a verdict.";
    case "illegal_transition":
      return "This pack has already received a terminal decision and cannot be changed. Derive a new pack instead.";
    case "not_an_assertion_node":
      return "Only assertion nodes carry a provenance chain to trace.";
    default:
      return `${error.code}: ${error.message}`;
  }
}

export interface ClientOptions {
  /** Recorded verbatim by the service on every decision. */
  curator?: string;
  fetchImpl?: typeof fetch;
}

export class PlpClient {
  private readonly baseUrl: string;
  private readonly curator?: string;
  private readonly fetchImpl: typeof fetch;

  constructor(baseUrl: string, options: ClientOptions = {}) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.curator = options.curator;
    this.fetchImpl = options.fetchImpl ?? fetch;
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
    extraHeaders: Record<string, string> = {},
  ): Promise<unknown> {
    const headers: Record<string, string> = { ...extraHeaders };
    if (body !== undefined) headers["Content-Type"] = "application/json";
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    let payload: unknown = null;
    if (text.length > 0) {
      try {
        payload = JSON.parse(text);
      } catch {
        payload = null;
      }
    }
    if (!response.ok) {
      const envelope = ErrorEnvelope.safeParse(payload);
      if (envelope.success) {
        throw new ApiError(
          envelope.data.code,
          envelope.data.message,
          envelope.data.detail,
          response.status,
        );
      }
      throw new ApiError("unexpected_response", text.slice(0, 200), null, response.status);
    }
    return payload;
  }

  async listPacks(state?: PackState): Promise<Pack[]> {
    const query = state ? `?state=${encodeURIComponent(state)}` : "";
    const payload = await this.request("GET", `/packs${query}`);
    return z.object({ packs: z.array(Pack) }).parse(payload).packs;
  }

  async getPack(packId: string): Promise<Pack> {
    return Pack.parse(await this.request("GET", `/packs/${encodeURIComponent(packId)}`));
  }

  async createPack(body: Record<string, unknown>): Promise<Pack> {
    return Pack.parse(await this.request("POST", "/packs", body));
  }

  async submitPack(packId: string): Promise<Pack> {
    return Pack.parse(
      await this.request("POST", `/packs/${encodeURIComponent(packId)}/submit`),
    );
  }

  async curatePack(
    packId: string,
    verdict: "accept" | "reject",
    justification: string,
  ): Promise<{ pack: Pack; decision: Decision }> {
    const headers: Record<string, string> = {};
    if (this.curator) headers["X-Curator"] = this.curator;
    const payload = await this.request(
      "POST",
      `/packs/${encodeURIComponent(packId)}/curate`,
      { verdict, justification },
      headers,
    );
    return z.object({ pack: Pack, decision: Decision }).parse(payload);
  }

  async validatePack(packId: string): Promise<ValidationReport> {
    return ValidationReport.parse(
      await this.request("GET", `/packs/${encodeURIComponent(packId)}/validate`),
    );
  }

  async packDecisions(packId: string): Promise<Decision[]> {
    const payload = await this.request(
      "GET",
      `/packs/${encodeURIComponent(packId)}/decisions`,
    );
    return z.object({ decisions: z.array(Decision) }).parse(payload).decisions;
  }

  async entityView(entityId: string, view: string): Promise<ContextGraph> {
    return ContextGraph.parse(
      await this.request(
        "GET",
        `/entities/${encodeURIComponent(entityId)}/views/${encodeURIComponent(view)}`,
      ),
    );
  }

  async trace(graphId: string, nodeId: string): Promise<TraceChain> {
    return TraceChain.parse(
      await this.request(
        "GET",
        `/graphs/${encodeURIComponent(graphId)}/trace/${encodeURIComponent(nodeId)}`,
      ),
    );
  }

  async linkPack(packId: string, entityId: string): Promise<void> {
    await this.request("POST", "/links", { pack_id: packId, entity_id: entityId });
  }

  async refractAll(): Promise<void> {
    await this.request("POST", "/refract-all");
  }

  async metrics(): Promise<Record<string, unknown>> {
    return z.record(z.unknown()).parse(await this.request("GET", "/metrics"));
  }
}
