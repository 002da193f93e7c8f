// Thin typed client over the query service. The base URL is injected so
// tests can point it at a fixture server (or stub fetch entirely).

import type { EntryResponse, GeoResponse, LanguageInfo, Page, SearchHit } from "./types.js";
import { PAGE_SIZE, type ViewState } from "./state.js";

export type Fetcher = (url: string) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetcher: Fetcher = (url) => fetch(url),
  ) {}

  searchUrl(state: ViewState): string {
    const params = new URLSearchParams({ q: state.query, field: state.field });
    if (state.lang) params.set("lang", state.lang);
    if (state.fold) params.set("fold", "1");
    params.set("limit", String(PAGE_SIZE));
    params.set("offset", String(state.page * PAGE_SIZE));
    return `${this.baseUrl}/search?${params.toString()}`;
  }

  async search(state: ViewState): Promise<Page<SearchHit>> {
    return this.getJson(this.searchUrl(state));
  }

  async entry(id: string): Promise<EntryResponse> {
    return this.getJson(`${this.baseUrl}/entries/${encodeURIComponent(id)}`);
  }

  async geo(): Promise<GeoResponse> {
    return this.getJson(`${this.baseUrl}/geo`);
  }

  async languages(q = "", clade = ""): Promise<Page<LanguageInfo>> {
    const params = new URLSearchParams();
    if (q) params.set("q", q);
    if (clade) params.set("clade", clade);
    params.set("limit", "500");
    return this.getJson(`${this.baseUrl}/languages?${params.toString()}`);
  }

  private async getJson<T>(url: string): Promise<T> {
    const response = await this.fetcher(url);
    if (!response.ok) {
      let message = `${response.status}`;
      try {
        const body = (await response.json()) as { message?: string };
        if (body.message) message = body.message;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiRequestError(response.status, message);
    }
    return (await response.json()) as T;
  }
}

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}
