/** Wire types mirroring the engine's documented API payloads. */

export type AnalysisKind =
  | "subtopics"
  | "wordcloud"
  | "sentiment"
  | "propaganda"
  | "trends"
  | "spatial"
  | "network"
  | "post_analysis";

export type JobState = "queued" | "running" | "done" | "failed" | "cancelled";

export interface ValidationRowError {
  row_index: number;
  error_code: string;
  message: string;
}

export interface ValidationReport {
  accepted: number;
  rejected: ValidationRowError[];
  total: number;
}

export interface DatasetRecord {
  dataset_id: string;
  name: string;
  created_at: string;
  status: "stored" | "analyzing" | "analyzed";
  metadata: {
    n_posts: number;
    time_range: [string, string];
    lang_counts: Record<string, number>;
    field_fill_rates: Record<string, number>;
  };
}

export interface Job {
  job_id: string;
  dataset_id: string;
  kind: AnalysisKind;
  priority: number;
  state: JobState;
  submitted_at: string;
  started_at: string | null;
  finished_at: string | null;
  error: string | null;
  webhook: string | null;
  params: Record<string, unknown> | null;
  queue_position?: number | null;
}

export interface AnalysisResult<P = Record<string, unknown>> {
  job_id: string;
  dataset_id: string;
  kind: AnalysisKind;
  payload: P;
  produced_at: string;
}

export interface WordCloudPayload {
  terms: { term: string; count: number }[];
}

export interface TrendsPayload {
  granularity: string;
  window: number;
  z_threshold: number;
  buckets: { start: string; post_count: number; engagement: number }[];
  spikes: { bucket_start: string; z_score: number; top_terms: string[] }[];
  spike_note?: string;
}

export interface SpatialPayload {
  regions: { region: string; post_count: number; lat: number; lon: number }[];
  posts_with_location: number;
  unresolved_geotags: number;
}

export interface NetworkPayload {
  damping: number;
  nodes: { id: string; in_degree: number; out_degree: number; pagerank: number }[];
  edges: { source: string; target: string; kind: string; weight: number }[];
  top_influencers: string[];
}

export interface SentimentPayload {
  lexicon_version: number;
  threshold: number;
  summary: { positive: number; negative: number; neutral: number };
  posts: { post_id: string; label: string; score: number }[];
}

export interface PropagandaPayload {
  pattern_version: number;
  threshold: number;
  summary: { flagged: number; total: number };
  posts: { post_id: string; flag: boolean; score: number; technique: string | null; spans: [number, number][] }[];
}

export interface SubtopicsPayload {
  seed: number;
  k: number;
  n_docs: number;
  vocab_size: number;
  inertia: number;
  clusters: { cluster_id: number; doc_count: number; top_terms: { term: string; weight: number }[] }[];
}

export interface PostAnalysisPayload {
  lexicon_version: number;
  records: { post_id: string; kind: string; label: string; degree: number; locations: string[] }[];
}

export interface Post {
  id: string;
  text: string;
  norm_text: string;
  tokens: string[];
  timestamp: string;
  author?: string;
  lat?: number;
  lon?: number;
  parent_id?: string;
  mentions?: string[];
  likes: number;
  shares: number;
  lang: string;
}

export interface Annotation {
  annotation_id: string;
  dataset_id: string;
  post_id: string;
  kind: string;
  old_label: string;
  new_label: string;
  annotator: string;
  created_at: string;
}

export interface SourceDescriptor {
  source_id: string;
  name: string;
  mode: "free" | "credentialed";
  param_schema: Record<string, unknown>;
  credential_schema: Record<string, unknown> | null;
}
