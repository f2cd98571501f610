// Wire types mirroring the server's JSON API.

export interface EntityRecord {
  id: string;
  name: string;
  review_count: number;
  // the server omits optional fields entirely when absent
  lat?: number | null;
  lon?: number | null;
  address?: string | null;
  image_url?: string | null;
  attr_means: Record<string, number>;
  group: number;
}

export interface EntitiesResponse {
  entities: EntityRecord[];
  entities_disabled: boolean;
}

export interface ClusterRecord {
  path: string;
  size: number;
  label: string;
  avg_sentiment: number;
  x: number;
  y: number;
  n_children: number;
}

export interface ClustersResponse {
  entity: string;
  path: string;
  node: ClusterRecord;
  nodes: ClusterRecord[];
}

export interface HistogramRecord {
  edges: number[];
  counts: number[];
  total: number;
}

export interface SummaryRecord {
  size: number;
  avg_chars: number;
  avg_words: number;
  avg_sentences: number;
  avg_sentiment: number;
  top_words: [string, number][];
  top_bigrams: [string, number][];
  histograms: Record<string, HistogramRecord>;
  means: Record<string, number>;
}

export interface SummaryResponse {
  entity: string;
  path: string;
  summary: SummaryRecord;
  dataset: SummaryRecord;
  compare_path: string | null;
  compare: SummaryRecord | null;
  divergent: { attribute: string; distance: number }[] | null;
}

export interface ChipRecord {
  attribute: string;
  score: number;
}

export interface ReviewRecord {
  id: string;
  entity_id: string;
  text: string;
  rating: number | null;
  date: string | null;
  sentiment: number;
  chips: ChipRecord[];
}

export interface ReviewsResponse {
  reviews: ReviewRecord[];
  total: number;
  offset: number;
  session_id: string | null;
}

export interface SessionResponse {
  session_id: string;
  entity: string;
  path: string;
  size: number;
  history: string[];
  color_attribute: string | null;
}

export interface SchemaResponse {
  attributes: string[];
  version: string;
  mode: string;
}

export interface SchemaSavedResponse {
  filename: string;
  path: string;
  attributes: string[];
}

export interface SuggestResponse {
  paths: string[];
  suggestions: string[];
}

export interface MetaResponse {
  version: string;
  mode: string;
  n_reviews: number;
  n_entities: number;
  n_features: number;
  feature_names: string[];
  entities_disabled: boolean;
}
