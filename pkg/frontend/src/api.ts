// Thin typed client over the JSON API. Every number the UI shows comes
// through here; the views only map responses to pixels.

import type {
  ClustersResponse,
  EntitiesResponse,
  MetaResponse,
  ReviewsResponse,
  SchemaResponse,
  SchemaSavedResponse,
  SessionResponse,
  SuggestResponse,
  SummaryResponse,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.status = status;
    this.detail = detail;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private base: string;
  private fetchFn: FetchLike;

  constructor(base = "", fetchFn?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    // bind so a bare window.fetch keeps its receiver
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      throw new ApiError(response.status, body && (body as { detail?: unknown }).detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  meta(): Promise<MetaResponse> {
    return this.request("/api/meta");
  }

  entities(): Promise<EntitiesResponse> {
    return this.request("/api/entities");
  }

  clusters(entity: string, path: string): Promise<ClustersResponse> {
    const params = new URLSearchParams({ entity, path });
    return this.request(`/api/clusters?${params}`);
  }

  summary(entity: string, path: string, compare?: string): Promise<SummaryResponse> {
    const params = new URLSearchParams({ entity, path });
    if (compare !== undefined) params.set("compare", compare);
    return this.request(`/api/summary?${params}`);
  }

  reviews(opts: {
    entity?: string;
    path?: string;
    session?: string;
    offset?: number;
    limit?: number;
  }): Promise<ReviewsResponse> {
    const params = new URLSearchParams();
    if (opts.session) params.set("session", opts.session);
    else {
      params.set("entity", opts.entity ?? "all");
      params.set("path", opts.path ?? "");
    }
    params.set("offset", String(opts.offset ?? 0));
    if (opts.limit !== undefined) params.set("limit", String(opts.limit));
    return this.request(`/api/reviews?${params}`);
  }

  command(body: {
    command: string;
    session_id?: string;
    entity?: string;
    path?: string;
  }): Promise<SessionResponse> {
    return this.post("/api/commands", body);
  }

  remoteRun(sessionId: string): Promise<SessionResponse> {
    return this.post("/api/commands/remote", { session_id: sessionId });
  }

  schema(): Promise<SchemaResponse> {
    return this.request("/api/schema");
  }

  saveSchema(attributes: string[]): Promise<SchemaSavedResponse> {
    return this.post("/api/schema", { attributes });
  }

  suggest(paths: string[], entity = "all"): Promise<SuggestResponse> {
    const params = new URLSearchParams({ paths: paths.join(","), entity });
    return this.request(`/api/schema/suggest?${params}`);
  }
}
