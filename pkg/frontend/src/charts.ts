// Minimal dependency-free SVG rendering. Pure string builders so the
// chart output is unit-testable without a DOM.

import type { Histogram, PolicyBar } from './comparison.js';
import type { SeriesResponse } from './types.js';

const W = 560;
const H = 220;
const PAD = 42;

function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

function scale(domainLo: number, domainHi: number, rangeLo: number, rangeHi: number) {
  const span = domainHi - domainLo || 1;
  return (v: number) => rangeLo + ((v - domainLo) / span) * (rangeHi - rangeLo);
}

/** Horizontal EU bars with +/-1.96 SE whiskers, best (smallest) on top. */
export function barChartSvg(bars: PolicyBar[], title: string): string {
  const rowH = 30;
  const height = PAD + bars.length * rowH + 14;
  const los = bars.map((b) => b.eu - 1.96 * b.se);
  const his = bars.map((b) => b.eu + 1.96 * b.se);
  const lo = Math.min(0, ...los);
  const hi = Math.max(0, ...his);
  const x = scale(lo, hi, PAD + 52, W - 16);
  const parts: string[] = [];
  parts.push(`<text x="${PAD}" y="16" class="title">${esc(title)}</text>`);
  parts.push(
    `<line x1="${x(0)}" y1="${PAD - 10}" x2="${x(0)}" y2="${height - 12}" class="axis"/>`,
  );
  bars.forEach((bar, i) => {
    const y = PAD + i * rowH;
    const x0 = Math.min(x(0), x(bar.eu));
    const width = Math.abs(x(bar.eu) - x(0));
    parts.push(`<text x="${PAD - 36}" y="${y + 14}" class="label">${esc(bar.policy)}</text>`);
    parts.push(
      `<rect x="${x0.toFixed(1)}" y="${y}" width="${width.toFixed(1)}" height="18" class="bar${
        i === 0 ? ' best' : ''
      }"/>`,
    );
    parts.push(
      `<line x1="${x(bar.eu - 1.96 * bar.se).toFixed(1)}" y1="${y + 9}" ` +
        `x2="${x(bar.eu + 1.96 * bar.se).toFixed(1)}" y2="${y + 9}" class="whisker"/>`,
    );
    parts.push(
      `<text x="${(x(bar.eu) + 6).toFixed(1)}" y="${y + 14}" class="value">` +
        `${bar.eu.toFixed(4)} ± ${bar.se.toFixed(4)}</text>`,
    );
  });
  return `<svg viewBox="0 0 ${W} ${height}" role="img">${parts.join('')}</svg>`;
}

export function histogramSvg(hist: Histogram, title: string): string {
  const maxCount = Math.max(1, ...hist.counts);
  const x = scale(hist.edges[0], hist.edges[hist.edges.length - 1], PAD, W - 16);
  const y = scale(0, maxCount, H - 28, 24);
  const parts: string[] = [];
  parts.push(`<text x="${PAD}" y="16" class="title">${esc(title)}</text>`);
  hist.counts.forEach((count, i) => {
    const x0 = x(hist.edges[i]);
    const x1 = x(hist.edges[i + 1]);
    parts.push(
      `<rect x="${x0.toFixed(1)}" y="${y(count).toFixed(1)}" ` +
        `width="${Math.max(0.5, x1 - x0 - 0.6).toFixed(1)}" ` +
        `height="${(H - 28 - y(count)).toFixed(1)}" class="hist"/>`,
    );
  });
  const lo = hist.edges[0];
  const hi = hist.edges[hist.edges.length - 1];
  parts.push(`<text x="${PAD}" y="${H - 8}" class="tick">${lo.toFixed(2)}</text>`);
  parts.push(
    `<text x="${W - 16}" y="${H - 8}" class="tick" text-anchor="end">${hi.toFixed(2)}</text>`,
  );
  return `<svg viewBox="0 0 ${W} ${H}" role="img">${parts.join('')}</svg>`;
}

/** Fitted series with its 95% band and the observed points. */
export function seriesSvg(series: SeriesResponse): string {
  const observed = series.observed.filter((v): v is number => v !== null && isFinite(v));
  const lo = Math.min(...series.lo95, ...observed);
  const hi = Math.max(...series.hi95, ...observed);
  const x = scale(series.years[0], series.years[series.years.length - 1], PAD, W - 16);
  const y = scale(lo, hi, H - 28, 24);
  const pt = (year: number, v: number) => `${x(year).toFixed(1)},${y(v).toFixed(1)}`;
  const band =
    series.years.map((yr, i) => pt(yr, series.hi95[i])).join(' ') +
    ' ' +
    [...series.years].reverse().map((yr) => {
      const i = series.years.indexOf(yr);
      return pt(yr, series.lo95[i]);
    }).join(' ');
  const meanPath = series.years.map((yr, i) => pt(yr, series.mean[i])).join(' ');
  const parts: string[] = [];
  parts.push(`<text x="${PAD}" y="16" class="title">${esc(series.node)}</text>`);
  parts.push(`<polygon points="${band}" class="band"/>`);
  parts.push(`<polyline points="${meanPath}" class="mean"/>`);
  series.years.forEach((yr, i) => {
    const v = series.observed[i];
    if (v !== null && isFinite(v as number)) {
      parts.push(`<circle cx="${x(yr).toFixed(1)}" cy="${y(v as number).toFixed(1)}" r="2.6" class="obs"/>`);
    }
  });
  parts.push(`<text x="${PAD}" y="${H - 8}" class="tick">${series.years[0]}</text>`);
  parts.push(
    `<text x="${W - 16}" y="${H - 8}" class="tick" text-anchor="end">${
      series.years[series.years.length - 1]
    }</text>`,
  );
  return `<svg viewBox="0 0 ${W} ${H}" role="img">${parts.join('')}</svg>`;
}
