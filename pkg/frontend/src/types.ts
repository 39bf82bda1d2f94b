/** Wire types for the portal HTTP/JSON API. */

export interface BBox {
  west: number;
  south: number;
  east: number;
  north: number;
}

export interface FacetValue {
  value: string;
  count: number;
}

export interface SearchResultItem {
  id: string;
  title: string;
  score: number;
  snippet: string;
  bbox: BBox | null;
}

export interface SearchEnvelope {
  total: number;
  page: number;
  page_size: number;
  results: SearchResultItem[];
  facets: Record<string, FacetValue[]>;
}

export interface AccessEndpoint {
  protocol: string;
  url: string;
}

export interface RecordDocument {
  id: string;
  resource_type: string;
  title: string;
  abstract: string;
  keywords: string[];
  topic_category: string;
  bbox: BBox | null;
  temporal_extent: { start: string; end: string } | null;
  crs_list: string[];
  lineage: string;
  publisher: string;
  contact: string;
  access_endpoints: AccessEndpoint[];
  created: string;
  modified: string;
}

export interface HealthResponse {
  status: string;
  record_count: number;
  catalog_version: number;
  thesaurus_loaded: boolean;
}

export interface ApiError {
  status: number;
  code: string;
  message: string;
}

export type SearchMode = "keyword" | "semantic";
