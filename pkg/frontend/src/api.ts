/** Thin portal API client with an injectable fetch so tests can record
 * requests. At most one search runs at a time: a newer search aborts the
 * previous one. */

import { searchParamsFor, type UiSearchState } from "./state.js";
import type {
  AccessEndpoint,
  ApiError,
  HealthResponse,
  RecordDocument,
  SearchEnvelope,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class PortalApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(error: ApiError) {
    super(error.message);
    this.code = error.code;
    this.status = error.status;
  }
}

async function parseResponse<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    const error = body as Partial<ApiError>;
    throw new PortalApiError({
      status: error.status ?? response.status,
      code: error.code ?? "internal",
      message: error.message ?? response.statusText,
    });
  }
  return body as T;
}

export class PortalClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private inflightSearch: AbortController | null = null;

  constructor(baseUrl = "", fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  searchUrl(state: UiSearchState): string {
    return `${this.baseUrl}/search?${searchParamsFor(state).toString()}`;
  }

  /** Runs the search for `state`, cancelling any still-running search. */
  async search(state: UiSearchState): Promise<SearchEnvelope> {
    this.inflightSearch?.abort();
    const controller = new AbortController();
    this.inflightSearch = controller;
    try {
      const response = await this.fetchImpl(this.searchUrl(state), {
        signal: controller.signal,
      });
      return await parseResponse<SearchEnvelope>(response);
    } finally {
      if (this.inflightSearch === controller) {
        this.inflightSearch = null;
      }
    }
  }

  async getRecord(id: string): Promise<RecordDocument> {
    const response = await this.fetchImpl(`${this.baseUrl}/records/${encodeURIComponent(id)}`);
    return parseResponse<RecordDocument>(response);
  }

  async getAccess(id: string): Promise<AccessEndpoint[]> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/records/${encodeURIComponent(id)}/access`,
    );
    const body = await parseResponse<{ endpoints: AccessEndpoint[] }>(response);
    return body.endpoints;
  }

  async health(): Promise<HealthResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/health`);
    return parseResponse<HealthResponse>(response);
  }
}
