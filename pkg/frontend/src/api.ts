// Typed client for the recommendation service. All numbers shown in the
// UI come straight out of these responses; the client never rescales.

import type {
  HealthResponse,
  ItemPage,
  RecommendRequest,
  RecommendResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }

  /** 5xx and network failures are dependency trouble, not user error. */
  get isDependencyFailure(): boolean {
    return this.status >= 500 || this.status === 0;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ApiError(0, "unreachable", `backend unreachable: ${err}`);
    }
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(
        response.status,
        typeof body.code === "string" ? body.code : "error",
        typeof body.message === "string" ? body.message : response.statusText,
      );
    }
    return body as T;
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/health");
  }

  items(category: string | null, page = 1, size = 60): Promise<ItemPage> {
    const params = new URLSearchParams({ page: String(page), size: String(size) });
    if (category) params.set("category", category);
    return this.request<ItemPage>(`/items?${params}`);
  }

  recommend(body: RecommendRequest, signal?: AbortSignal): Promise<RecommendResponse> {
    return this.request<RecommendResponse>("/recommend", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }
}
