// Payload shapes of the engine's HTTP API. The UI renders these verbatim:
// every expected utility and standard error on screen comes from the
// server; the client only bins histograms and displays deltas.

export type InterventionKind = 'set' | 'scale' | 'shift';

export interface InterventionDoc {
  node: string;
  kind: InterventionKind;
  magnitude: number;
  years: [number, number] | null;
}

export interface PolicyDocument {
  name: string;
  description: string;
  interventions: InterventionDoc[];
}

export interface ReportRow {
  policy: string;
  expected_utility: number;
  mc_se: number;
  rank: number;
}

export interface RunRecord {
  run_id: string;
  status: 'pending' | 'done' | 'failed';
  seed: number;
  n_samples: number;
  ranking: string[];
  report: ReportRow[];
  samples: Record<string, number[]>;
  policies: PolicyDocument[];
  created_at?: string;
}

export interface RunIndexEntry {
  run_id: string;
  status: string;
  seed: number;
  n_samples: number;
  policies: string[];
  ranking: string[];
  created_at?: string;
}

export interface SeriesResponse {
  node: string;
  years: number[];
  observed: (number | null)[];
  mean: number[];
  lo95: number[];
  hi95: number[];
}

export interface NetworkDocument {
  name: string;
  nodes: string[];
  edges: [string, string][];
  log_scale: string[];
  [key: string]: unknown;
}

export interface PoliciesResponse {
  builtin: PolicyDocument[];
  saved: PolicyDocument[];
}

export interface EvaluateRequest {
  policies: (string | PolicyDocument)[];
  n: number;
  seed: number;
}

export interface EvaluateResponse {
  run_id: string;
  status: string;
}
