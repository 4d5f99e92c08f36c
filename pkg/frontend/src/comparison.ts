// Comparison model: order policies by server-reported expected utility
// (ascending; smaller loss = better), bin per-replicate utilities for
// histograms, and show deltas of the verbatim EU values. No other
// statistics are computed client-side.

import type { RunRecord } from './types.js';

export interface PolicyBar {
  policy: string;
  eu: number;
  se: number;
  rank: number;
}

export interface Histogram {
  edges: number[]; // length bins + 1
  counts: number[]; // length bins
}

export interface DeltaRow {
  policy: string;
  deltaEu: number; // EU(policy) - EU(baseline), API values verbatim
}

export interface RunView {
  runId: string;
  seed: number;
  nSamples: number;
  bars: PolicyBar[];
  best: string | null;
  deltas: DeltaRow[];
  histograms: Record<string, Histogram>;
}

export interface ComparisonView {
  runs: RunView[];
  showSeedBadges: boolean;
}

export const ORIENTATION_NOTE =
  'smaller expected utility = less malnutrition/disadvantage (utility is a loss)';

export function orderedBars(record: RunRecord): PolicyBar[] {
  const rows = [...record.report];
  rows.sort(
    (a, b) => a.expected_utility - b.expected_utility || a.policy.localeCompare(b.policy),
  );
  return rows.map((row, i) => ({
    policy: row.policy,
    eu: row.expected_utility,
    se: row.mc_se,
    rank: i + 1,
  }));
}

export function histogram(values: number[], bins = 30): Histogram {
  if (values.length === 0 || bins < 1) {
    return { edges: [0, 1], counts: [0] };
  }
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const width = (hi - lo) / bins;
  const edges = Array.from({ length: bins + 1 }, (_, i) => lo + i * width);
  const counts = new Array(bins).fill(0);
  for (const v of values) {
    let idx = Math.floor((v - lo) / width);
    if (idx >= bins) idx = bins - 1; // hi lands in the last bin
    if (idx < 0) idx = 0;
    counts[idx] += 1;
  }
  return { edges, counts };
}

export function deltas(record: RunRecord, baseline: string): DeltaRow[] {
  const base = record.report.find((r) => r.policy === baseline);
  if (!base) return [];
  return orderedBars(record)
    .filter((bar) => bar.policy !== baseline)
    .map((bar) => ({ policy: bar.policy, deltaEu: bar.eu - base.expected_utility }));
}

export function buildRunView(record: RunRecord, baseline?: string, bins = 30): RunView {
  const bars = orderedBars(record);
  const base = baseline ?? (bars.length > 0 ? bars[bars.length - 1].policy : undefined);
  const histograms: Record<string, Histogram> = {};
  for (const [policy, values] of Object.entries(record.samples ?? {})) {
    histograms[policy] = histogram(values, bins);
  }
  return {
    runId: record.run_id,
    seed: record.seed,
    nSamples: record.n_samples,
    bars,
    best: bars.length > 0 ? bars[0].policy : null,
    deltas: base !== undefined ? deltas(record, base) : [],
    histograms,
  };
}

export function buildComparison(records: RunRecord[], baseline?: string): ComparisonView {
  const runs = records.map((rec) => buildRunView(rec, baseline));
  const seeds = new Set(records.map((r) => r.seed));
  return { runs, showSeedBadges: seeds.size > 1 };
}
