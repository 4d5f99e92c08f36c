// Ordering, binning, and delta display against a canned run record.

import { describe, expect, it } from 'vitest';
import {
  ORIENTATION_NOTE,
  buildComparison,
  buildRunView,
  deltas,
  histogram,
  orderedBars,
} from '../src/comparison.js';
import { barChartSvg, histogramSvg } from '../src/charts.js';
import type { RunRecord } from '../src/types.js';

// shaped like a real run of the five stock policies on the bundled fixture
function fixtureRun(seed = 42): RunRecord {
  return {
    run_id: 'c006623b4cec63e4',
    status: 'done',
    seed,
    n_samples: 500,
    ranking: ['P3', 'P5', 'P4', 'P1', 'P2'],
    report: [
      { policy: 'P1', expected_utility: -0.4263, mc_se: 0.0214, rank: 4 },
      { policy: 'P2', expected_utility: 0.8692, mc_se: 0.0025, rank: 5 },
      { policy: 'P3', expected_utility: -19.656, mc_se: 0.4905, rank: 1 },
      { policy: 'P4', expected_utility: -10.4919, mc_se: 0.5793, rank: 3 },
      { policy: 'P5', expected_utility: -16.1367, mc_se: 1.2276, rank: 2 },
    ],
    samples: {
      P1: [-0.5, -0.4, -0.45, -0.38, -0.42],
      P2: [0.86, 0.88, 0.87, 0.85, 0.89],
      P3: [-19, -20, -18, -21, -20.5],
      P4: [-10, -11, -10.5, -9.8, -10.2],
      P5: [-16, -15, -17, -16.5, -15.8],
    },
    policies: [],
  };
}

describe('orderedBars', () => {
  it('orders ascending by expected utility with the best policy first', () => {
    const bars = orderedBars(fixtureRun());
    expect(bars.map((b) => b.policy)).toEqual(['P3', 'P5', 'P4', 'P1', 'P2']);
    expect(bars[0].rank).toBe(1);
    expect(bars[0].eu).toBeLessThan(bars[4].eu);
  });

  it('breaks exact ties by policy name', () => {
    const run = fixtureRun();
    run.report = [
      { policy: 'B', expected_utility: 1.0, mc_se: 0, rank: 1 },
      { policy: 'A', expected_utility: 1.0, mc_se: 0, rank: 2 },
    ];
    expect(orderedBars(run).map((b) => b.policy)).toEqual(['A', 'B']);
  });

  it('uses the API values verbatim', () => {
    const bars = orderedBars(fixtureRun());
    const p3 = bars.find((b) => b.policy === 'P3')!;
    expect(p3.eu).toBe(-19.656);
    expect(p3.se).toBe(0.4905);
  });
});

describe('histogram', () => {
  it('conserves the sample count and covers the range', () => {
    const values = [1, 2, 2.5, 3, 3, 3.2, 8];
    const hist = histogram(values, 7);
    expect(hist.counts.reduce((a, b) => a + b, 0)).toBe(values.length);
    expect(hist.edges[0]).toBe(1);
    expect(hist.edges[hist.edges.length - 1]).toBe(8);
    expect(hist.counts).toHaveLength(7);
    expect(hist.edges).toHaveLength(8);
  });

  it('puts the maximum into the last bin', () => {
    const hist = histogram([0, 1], 2);
    expect(hist.counts).toEqual([1, 1]);
  });

  it('handles constant samples', () => {
    const hist = histogram([2, 2, 2], 5);
    expect(hist.counts.reduce((a, b) => a + b, 0)).toBe(3);
  });

  it('handles empty input', () => {
    expect(histogram([], 10).counts).toEqual([0]);
  });
});

describe('deltas', () => {
  it('is the verbatim EU difference against the baseline', () => {
    const rows = deltas(fixtureRun(), 'P1');
    const p2 = rows.find((r) => r.policy === 'P2')!;
    expect(p2.deltaEu).toBeCloseTo(0.8692 - -0.4263, 12);
    expect(rows.map((r) => r.policy)).not.toContain('P1');
  });

  it('is empty for an unknown baseline', () => {
    expect(deltas(fixtureRun(), 'nope')).toEqual([]);
  });
});

describe('buildComparison', () => {
  it('renders one view per run with the best policy flagged', () => {
    const view = buildComparison([fixtureRun()], 'P1');
    expect(view.runs).toHaveLength(1);
    expect(view.runs[0].best).toBe('P3');
    expect(view.runs[0].deltas).toHaveLength(4);
    expect(view.showSeedBadges).toBe(false);
  });

  it('single run shows no deltas when baseline is absent', () => {
    const run = fixtureRun();
    run.report = [run.report[2]]; // P3 only
    run.samples = { P3: run.samples.P3 };
    const view = buildRunView(run, 'P1');
    expect(view.bars).toHaveLength(1);
    expect(view.deltas).toEqual([]);
  });

  it('two runs with different seeds get seed badges', () => {
    const view = buildComparison([fixtureRun(42), fixtureRun(7)], 'P1');
    expect(view.showSeedBadges).toBe(true);
  });

  it('orientation note says lower is better', () => {
    expect(ORIENTATION_NOTE).toMatch(/smaller expected utility/);
  });
});

describe('svg rendering', () => {
  it('bar chart marks the leftmost (best) policy', () => {
    const svg = barChartSvg(orderedBars(fixtureRun()), 'test');
    expect(svg).toContain('class="bar best"');
    expect(svg.indexOf('P3')).toBeLessThan(svg.indexOf('P2'));
  });

  it('histogram emits one rect per bin', () => {
    const hist = histogram([1, 2, 3, 4], 4);
    const svg = histogramSvg(hist, 'h');
    expect(svg.match(/class="hist"/g)).toHaveLength(4);
  });

  it('escapes markup in titles', () => {
    const svg = histogramSvg(histogram([1], 1), '<script>');
    expect(svg).not.toContain('<script>');
  });
});
