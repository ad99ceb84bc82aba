import type {
  AttributeSearchResponse,
  ClassesResponse,
  ImageSearchResponse,
  PresetsResponse,
  QueryEntryPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}

/**
 * Thin client for the search service. Search calls share one
 * AbortController: starting a new search cancels the one in flight, so the
 * gallery only ever shows the latest submission.
 */
export class Api {
  private inflight: AbortController | null = null;

  constructor(
    private base = "",
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.base + path, init);
    if (!res.ok) {
      let detail = `${res.status} ${res.statusText}`;
      try {
        const body = (await res.json()) as { detail?: string };
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(res.status, detail);
    }
    return res.json() as Promise<T>;
  }

  private searchSignal(): AbortSignal {
    this.inflight?.abort();
    this.inflight = new AbortController();
    return this.inflight.signal;
  }

  classes(): Promise<ClassesResponse> {
    return this.request("/api/classes");
  }

  presets(): Promise<PresetsResponse> {
    return this.request("/api/presets");
  }

  searchAttributes(entries: QueryEntryPayload[], k: number): Promise<AttributeSearchResponse> {
    return this.request("/api/search/attributes", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ entries, k }),
      signal: this.searchSignal(),
    });
  }

  searchByImage(imageId: string, k: number): Promise<ImageSearchResponse> {
    const q = `image_id=${encodeURIComponent(imageId)}&k=${k}`;
    return this.request(`/api/search?${q}`, { signal: this.searchSignal() });
  }

  imageUrl(imageId: string): string {
    return `${this.base}/api/images/${encodeURIComponent(imageId)}/image`;
  }
}
