export class ApiError extends Error {
    constructor(status, detail) {
        super(detail);
        this.status = status;
        this.name = "ApiError";
    }
}
export function isAbort(err) {
    return err instanceof DOMException && err.name === "AbortError";
}
/**
 * Thin client for the search service. Search calls share one
 * AbortController: starting a new search cancels the one in flight, so the
 * gallery only ever shows the latest submission.
 */
export class Api {
    constructor(base = "", fetchImpl = fetch) {
        this.base = base;
        this.fetchImpl = fetchImpl;
        this.inflight = null;
    }
    async request(path, init) {
        const res = await this.fetchImpl(this.base + path, init);
        if (!res.ok) {
            let detail = `${res.status} ${res.statusText}`;
            try {
                const body = (await res.json());
                if (body && typeof body.detail === "string")
                    detail = body.detail;
            }
            catch {
                // non-JSON error body; keep the status line
            }
            throw new ApiError(res.status, detail);
        }
        return res.json();
    }
    searchSignal() {
        this.inflight?.abort();
        this.inflight = new AbortController();
        return this.inflight.signal;
    }
    classes() {
        return this.request("/api/classes");
    }
    presets() {
        return this.request("/api/presets");
    }
    searchAttributes(entries, k) {
        return this.request("/api/search/attributes", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ entries, k }),
            signal: this.searchSignal(),
        });
    }
    searchByImage(imageId, k) {
        const q = `image_id=${encodeURIComponent(imageId)}&k=${k}`;
        return this.request(`/api/search?${q}`, { signal: this.searchSignal() });
    }
    imageUrl(imageId) {
        return `${this.base}/api/images/${encodeURIComponent(imageId)}/image`;
    }
}
