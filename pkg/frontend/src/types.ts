/** Payload types of the serve-layer HTTP API. */

export type CurationTag = 'EPS' | 'NOT_EPS' | 'UNTAGGED';

export interface ApiTerm {
  id: number;
  label: string;
  x: number;
  y: number;
  weight: number;
  impact: number;
  tag: CurationTag;
  color_impact: string;
}

export interface MapPayload {
  field: string;
  config: string;
  seed: string;
  terms: ApiTerm[];
}

export interface FieldStats {
  field: string;
  total: number;
  eps: number;
  not_eps: number;
  untagged: number;
  eps_fraction: number;
  eps_percent: number;
}

export interface TagDecision {
  term_id: number;
  tag: CurationTag;
  note?: string;
}

export interface InterfaceTopicRow {
  topic_id: number;
  size: number;
  eps_pub_share: number;
  hls_citation_share: number;
  selected: boolean;
}

export interface InterfaceReport {
  summary: {
    selected_topics: number[];
    interface_share: number | null;
    eps_threshold: number;
    hls_threshold: number;
    counting: string;
  };
  topics: InterfaceTopicRow[];
}

export type ColorMode = 'impact' | 'curation';

export interface Viewport {
  centerX: number;
  centerY: number;
  zoom: number; // 1 = whole map fits; larger zooms in
}
