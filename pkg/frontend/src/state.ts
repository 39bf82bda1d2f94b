/** Search-page state and its lossless URL query-string encoding.
 *
 * The URL is the source of truth: q, mode, bbox, facet.*, page, record.
 * Serialization is canonical (defaults omitted), so serialize(parse(s)) === s
 * for every string serialize can produce.
 */

import { formatBBox, isValidBBox, parseBBox } from "./bbox.js";
import type { BBox, SearchMode } from "./types.js";

export interface UiSearchState {
  queryText: string;
  mode: SearchMode;
  drawnBbox: BBox | null;
  activeFacets: Array<[string, string]>;
  page: number;
  /** Record id for the detail panel deep link; null when the panel is closed. */
  recordId: string | null;
}

export const FACETABLE_FIELDS = ["resource_type", "publisher", "topic_category"] as const;

export function emptyState(mode: SearchMode = "keyword"): UiSearchState {
  return { queryText: "", mode, drawnBbox: null, activeFacets: [], page: 0, recordId: null };
}

/** A state with no criteria cannot be submitted (the search API rejects it). */
export function hasCriteria(state: UiSearchState): boolean {
  return (
    state.queryText.trim() !== "" || state.drawnBbox !== null || state.activeFacets.length > 0
  );
}

export function serializeState(state: UiSearchState): string {
  const params = new URLSearchParams();
  if (state.queryText !== "") {
    params.set("q", state.queryText);
  }
  params.set("mode", state.mode);
  if (state.drawnBbox !== null) {
    params.set("bbox", formatBBox(state.drawnBbox));
  }
  for (const [field, value] of state.activeFacets) {
    params.append(`facet.${field}`, value);
  }
  if (state.page > 0) {
    params.set("page", String(state.page));
  }
  if (state.recordId !== null) {
    params.set("record", state.recordId);
  }
  return params.toString();
}

export function parseState(query: string, defaultMode: SearchMode = "keyword"): UiSearchState {
  const params = new URLSearchParams(query);
  const state = emptyState(defaultMode);

  state.queryText = params.get("q") ?? "";
  const mode = params.get("mode");
  if (mode === "keyword" || mode === "semantic") {
    state.mode = mode;
  }
  const bboxRaw = params.get("bbox");
  if (bboxRaw !== null) {
    const box = parseBBox(bboxRaw);
    if (box !== null && isValidBBox(box)) {
      state.drawnBbox = box;
    }
  }
  for (const [key, value] of params.entries()) {
    if (key.startsWith("facet.")) {
      state.activeFacets.push([key.slice("facet.".length), value]);
    }
  }
  const page = Number(params.get("page") ?? "0");
  state.page = Number.isInteger(page) && page > 0 ? page : 0;
  state.recordId = params.get("record");
  return state;
}

/** The /search request parameters derived 1:1 from the state. */
export function searchParamsFor(state: UiSearchState): URLSearchParams {
  const params = new URLSearchParams();
  if (state.queryText.trim() !== "") {
    params.set("q", state.queryText);
  }
  params.set("mode", state.mode);
  if (state.drawnBbox !== null) {
    params.set("bbox", formatBBox(state.drawnBbox));
    params.set("relation", "intersects");
  }
  for (const [field, value] of state.activeFacets) {
    params.append(`facet.${field}`, value);
  }
  params.set("page", String(state.page));
  return params;
}

export function toggleFacet(state: UiSearchState, field: string, value: string): UiSearchState {
  const existing = state.activeFacets.findIndex(([f, v]) => f === field && v === value);
  const activeFacets =
    existing >= 0
      ? state.activeFacets.filter((_, i) => i !== existing)
      : [...state.activeFacets, [field, value] as [string, string]];
  return { ...state, activeFacets, page: 0 };
}
