/** Pure HTML renderers. Everything here returns strings so the rendering
 * contract is testable without a DOM. */

import { formatBBox } from "./bbox.js";
import type { RecordDocument, AccessEndpoint, SearchEnvelope } from "./types.js";
import type { UiSearchState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderResults(envelope: SearchEnvelope): string {
  const items = envelope.results
    .map(
      (result) => `
<li class="result" data-id="${escapeHtml(result.id)}">
  <a href="#" class="result-title" data-id="${escapeHtml(result.id)}">${escapeHtml(result.title) || "(untitled)"}</a>
  <span class="result-score">${result.score.toFixed(4)}</span>
  <p class="result-snippet">${escapeHtml(result.snippet)}</p>
</li>`,
    )
    .join("\n");
  return `
<p class="result-count"><span class="total">${envelope.total}</span> matching records
  (page ${envelope.page + 1})</p>
<ul class="results">${items}</ul>`;
}

/** The count the page displays; kept in lockstep with the envelope's total. */
export function renderedTotal(html: string): number {
  const match = html.match(/<span class="total">(\d+)<\/span>/);
  return match ? Number(match[1]) : NaN;
}

export function renderFacets(envelope: SearchEnvelope, state: UiSearchState): string {
  const sections = Object.entries(envelope.facets).map(([field, values]) => {
    const rows = values
      .map((facet) => {
        const active = state.activeFacets.some(([f, v]) => f === field && v === facet.value);
        return `<li><a href="#" class="facet${active ? " active" : ""}"
  data-field="${escapeHtml(field)}" data-value="${escapeHtml(facet.value)}">
  ${escapeHtml(facet.value)} (${facet.count})</a></li>`;
      })
      .join("\n");
    return `<section class="facet-group"><h3>${escapeHtml(field)}</h3><ul>${rows}</ul></section>`;
  });
  return sections.join("\n");
}

export function renderPager(envelope: SearchEnvelope): string {
  const lastPage = envelope.total === 0 ? 0 : Math.ceil(envelope.total / envelope.page_size) - 1;
  const previous =
    envelope.page > 0
      ? `<a href="#" class="page-link" data-page="${envelope.page - 1}">previous</a>`
      : "";
  const next =
    envelope.page < lastPage
      ? `<a href="#" class="page-link" data-page="${envelope.page + 1}">next</a>`
      : "";
  return `<nav class="pager">${previous} ${next}</nav>`;
}

// Mirror of the server's default "sdi-basic" profile, for the detail panel.
const MANDATORY = ["id", "title", "abstract", "resource_type", "bbox", "publisher"] as const;
const RECOMMENDED = [
  "keywords", "topic_category", "temporal_extent", "crs_list", "lineage",
  "access_endpoints", "contact",
] as const;

function populated(record: RecordDocument, field: string): boolean {
  const value = (record as unknown as Record<string, unknown>)[field];
  if (value === null || value === undefined) return false;
  if (typeof value === "string") return value.trim() !== "";
  if (Array.isArray(value)) return value.length > 0;
  return true;
}

export function completeness(record: RecordDocument): number {
  const mandatory = MANDATORY.filter((f) => populated(record, f)).length;
  const recommended = RECOMMENDED.filter((f) => populated(record, f)).length;
  return (mandatory + 0.5 * recommended) / (MANDATORY.length + 0.5 * RECOMMENDED.length);
}

export function renderDetail(record: RecordDocument, endpoints: AccessEndpoint[]): string {
  const bindLinks =
    endpoints.length === 0
      ? `<p class="no-endpoints">no access endpoints published</p>`
      : `<ul class="endpoints">${endpoints
          .map(
            (endpoint) =>
              `<li><a href="${escapeHtml(endpoint.url)}" target="_blank" rel="noopener">
  ${escapeHtml(endpoint.protocol)}</a> <code>${escapeHtml(endpoint.url)}</code></li>`,
          )
          .join("\n")}</ul>`;
  const temporal = record.temporal_extent
    ? `${record.temporal_extent.start} – ${record.temporal_extent.end}`
    : "—";
  const rows: Array<[string, string]> = [
    ["id", record.id],
    ["type", record.resource_type],
    ["abstract", record.abstract],
    ["keywords", record.keywords.join(", ") || "—"],
    ["topic", record.topic_category || "—"],
    ["extent", record.bbox ? formatBBox(record.bbox) : "—"],
    ["temporal", temporal],
    ["CRS", record.crs_list.join(", ") || "—"],
    ["lineage", record.lineage || "—"],
    ["publisher", record.publisher || "—"],
    ["contact", record.contact || "—"],
    ["created", record.created],
    ["modified", record.modified],
  ];
  const dl = rows
    .map(([k, v]) => `<dt>${escapeHtml(k)}</dt><dd>${escapeHtml(v)}</dd>`)
    .join("\n");
  return `
<article class="detail">
  <h2>${escapeHtml(record.title) || "(untitled)"}</h2>
  <p class="completeness">metadata completeness:
    <span class="completeness-value">${(completeness(record) * 100).toFixed(0)}%</span></p>
  <dl>${dl}</dl>
  <h3>bind</h3>
  ${bindLinks}
</article>`;
}

export function renderMissingRecord(id: string): string {
  return `<article class="detail missing"><h2>record no longer exists</h2>
<p>No record with id <code>${escapeHtml(id)}</code> was found.</p></article>`;
}

export function renderErrorBanner(code: string, message: string): string {
  return `<div class="banner error" role="alert">
  <strong>${escapeHtml(code)}</strong> ${escapeHtml(message)}
  <button class="retry">retry</button>
</div>`;
}
