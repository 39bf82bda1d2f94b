/** Bootstraps the portal page: URL-driven state, search form, facet sidebar,
 * results list, detail panel, and the map. */

import { PortalApiError, PortalClient } from "./api.js";
import { formatBBox, parseBBox } from "./bbox.js";
import { MapController } from "./map.js";
import {
  emptyState,
  hasCriteria,
  parseState,
  serializeState,
  toggleFacet,
  type UiSearchState,
} from "./state.js";
import {
  renderDetail,
  renderErrorBanner,
  renderFacets,
  renderMissingRecord,
  renderPager,
  renderResults,
} from "./render.js";
import type { SearchEnvelope, SearchMode } from "./types.js";

const client = new PortalClient("..");

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

let state: UiSearchState = emptyState();
let defaultMode: SearchMode = "keyword";
let lastEnvelope: SearchEnvelope | null = null;

const searchInput = () => element<HTMLInputElement>("query");
const modeToggle = () => element<HTMLInputElement>("mode-semantic");
const bboxInput = () => element<HTMLInputElement>("bbox-text");

function pushState(next: UiSearchState): void {
  state = next;
  const query = serializeState(state);
  history.pushState(null, "", query ? `?${query}` : location.pathname);
  void refresh();
}

function showNotice(text: string | null): void {
  element("notice").textContent = text ?? "";
}

function showBanner(html: string, retry: (() => void) | null): void {
  const banner = element("banner");
  banner.innerHTML = html;
  const button = banner.querySelector<HTMLButtonElement>("button.retry");
  if (button && retry) {
    button.addEventListener("click", () => {
      banner.innerHTML = "";
      retry();
    });
  }
}

function syncFormFromState(): void {
  searchInput().value = state.queryText;
  modeToggle().checked = state.mode === "semantic";
  bboxInput().value = state.drawnBbox ? formatBBox(state.drawnBbox) : "";
}

async function refresh(): Promise<void> {
  syncFormFromState();
  element("banner").innerHTML = "";
  const submit = element<HTMLButtonElement>("submit");
  const usable = hasCriteria(state);
  submit.disabled = !usable;
  element("criteria-hint").textContent = usable
    ? ""
    : "enter keywords, draw a rectangle, or pick a facet to search";

  if (usable) {
    try {
      const envelope = await client.search(state);
      lastEnvelope = envelope;
      element("results").innerHTML = renderResults(envelope) + renderPager(envelope);
      element("facets").innerHTML = renderFacets(envelope, state);
      map.setResultBoxes(envelope.results.flatMap((r) => (r.bbox ? [r.bbox] : [])));
      wireResultLinks();
    } catch (error) {
      if ((error as Error).name === "AbortError") return;
      const apiError = error instanceof PortalApiError
        ? error
        : new PortalApiError({ status: 0, code: "network", message: String(error) });
      showBanner(renderErrorBanner(apiError.code, apiError.message), () => void refresh());
    }
  } else {
    element("results").innerHTML = "";
    element("facets").innerHTML = "";
    map.setResultBoxes([]);
  }
  map.setDrawnBox(state.drawnBbox);
  await refreshDetail();
}

async function refreshDetail(): Promise<void> {
  const panel = element("detail");
  if (!state.recordId) {
    panel.innerHTML = "";
    panel.hidden = true;
    return;
  }
  panel.hidden = false;
  try {
    const record = await client.getRecord(state.recordId);
    const endpoints = await client.getAccess(state.recordId);
    panel.innerHTML = renderDetail(record, endpoints);
  } catch (error) {
    if (error instanceof PortalApiError && error.status === 404) {
      panel.innerHTML = renderMissingRecord(state.recordId);
    } else {
      panel.innerHTML = renderErrorBanner("internal", String(error));
    }
  }
  const close = document.createElement("button");
  close.textContent = "close";
  close.className = "close-detail";
  close.addEventListener("click", () => pushState({ ...state, recordId: null }));
  panel.prepend(close);
}

function wireResultLinks(): void {
  for (const link of document.querySelectorAll<HTMLAnchorElement>("a.result-title")) {
    link.addEventListener("click", (event) => {
      event.preventDefault();
      pushState({ ...state, recordId: link.dataset.id ?? null });
    });
  }
  for (const link of document.querySelectorAll<HTMLAnchorElement>("a.facet")) {
    link.addEventListener("click", (event) => {
      event.preventDefault();
      pushState(toggleFacet(state, link.dataset.field ?? "", link.dataset.value ?? ""));
    });
  }
  for (const link of document.querySelectorAll<HTMLAnchorElement>("a.page-link")) {
    link.addEventListener("click", (event) => {
      event.preventDefault();
      pushState({ ...state, page: Number(link.dataset.page ?? "0") });
    });
  }
}

const map = new MapController(
  document.getElementById("map") as unknown as SVGSVGElement,
  {
    onBoxDrawn(box, notice) {
      showNotice(notice);
      pushState({ ...state, drawnBbox: box, page: 0 });
    },
  },
);

function wireForm(): void {
  element<HTMLFormElement>("search-form").addEventListener("submit", (event) => {
    event.preventDefault();
    pushState({
      ...state,
      queryText: searchInput().value,
      mode: modeToggle().checked ? "semantic" : "keyword",
      page: 0,
    });
  });
  bboxInput().addEventListener("change", () => {
    const text = bboxInput().value.trim();
    if (text === "") {
      pushState({ ...state, drawnBbox: null, page: 0 });
      return;
    }
    const box = parseBBox(text);
    if (box === null) {
      showNotice("rectangle must be west,south,east,north in degrees");
      return;
    }
    showNotice(null);
    pushState({ ...state, drawnBbox: box, page: 0 });
  });
  element("clear-bbox").addEventListener("click", () => {
    pushState({ ...state, drawnBbox: null, page: 0 });
  });
  element("tool-pan").addEventListener("click", () => setTool("pan"));
  element("tool-draw").addEventListener("click", () => setTool("draw"));
  element("zoom-in").addEventListener("click", () => map.zoom(1.25));
  element("zoom-out").addEventListener("click", () => map.zoom(0.8));
}

function setTool(tool: "pan" | "draw"): void {
  map.mode = tool;
  element("tool-pan").classList.toggle("active", tool === "pan");
  element("tool-draw").classList.toggle("active", tool === "draw");
}

async function boot(): Promise<void> {
  try {
    const health = await client.health();
    defaultMode = health.thesaurus_loaded ? "semantic" : "keyword";
  } catch {
    defaultMode = "keyword";
  }
  state = parseState(location.search.replace(/^\?/, ""), defaultMode);
  if (location.search === "") {
    state = emptyState(defaultMode);
  }
  window.addEventListener("popstate", () => {
    state = parseState(location.search.replace(/^\?/, ""), defaultMode);
    void refresh();
  });
  wireForm();
  setTool("pan");
  await refresh();
}

void boot();
