// Single-page wiring: policy builder on the left, run comparison on the
// right. All state lives in this module for the browser session; nothing
// is persisted client-side.

import { ApiClient, ApiError, buildAndSubmitPolicy, waitForRun } from './api.js';
import { ORIENTATION_NOTE, buildComparison } from './comparison.js';
import { barChartSvg, histogramSvg, seriesSvg } from './charts.js';
import {
  KINDS,
  blankRow,
  emptyDraft,
  validateDraft,
  type PolicyDraft,
} from './policy.js';
import type { RunRecord } from './types.js';

const client = new ApiClient('');

interface AppState {
  nodes: string[];
  years: [number, number] | null;
  draft: PolicyDraft;
  selectedRuns: RunRecord[];
  banner: string | null;
  busy: boolean;
}

const state: AppState = {
  nodes: [],
  years: null,
  draft: emptyDraft(),
  selectedRuns: [],
  banner: null,
  busy: false,
};

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function setBanner(text: string | null) {
  state.banner = text;
  const banner = el<HTMLDivElement>('banner');
  banner.hidden = text === null;
  el<HTMLSpanElement>('banner-text').textContent = text ?? '';
}

async function loadNetwork() {
  const doc = await client.getNetwork();
  state.nodes = doc.nodes;
  const picker = el<HTMLSelectElement>('series-picker');
  picker.innerHTML = doc.nodes
    .map((n) => `<option value="${n}">${n}</option>`)
    .join('');
  picker.onchange = () => renderSeries(picker.value);
  if (doc.nodes.length > 0) renderSeries(doc.nodes[0]);
}

async function renderSeries(node: string) {
  try {
    const series = await client.getSeries(node);
    el<HTMLDivElement>('series-chart').innerHTML = seriesSvg(series);
  } catch (err) {
    if (err instanceof ApiError) setBanner(err.detail);
  }
}

function renderDraft() {
  const holder = el<HTMLDivElement>('rows');
  const check = validateDraft(state.draft, state.nodes);
  const errorsByRow = new Map<number, string[]>();
  for (const e of check.rowErrors) {
    errorsByRow.set(e.row, [...(errorsByRow.get(e.row) ?? []), e.message]);
  }
  holder.innerHTML = '';
  state.draft.rows.forEach((row, i) => {
    const div = document.createElement('div');
    div.className = 'row';
    const nodeOptions = ['<option value="">variable...</option>']
      .concat(
        state.nodes.map(
          (n) => `<option value="${n}" ${n === row.node ? 'selected' : ''}>${n}</option>`,
        ),
      )
      .join('');
    const kindOptions = KINDS.map(
      (k) => `<option value="${k}" ${k === row.kind ? 'selected' : ''}>${k}</option>`,
    ).join('');
    const errors = errorsByRow.get(i) ?? [];
    div.innerHTML = `
      <select data-field="node">${nodeOptions}</select>
      <select data-field="kind">${kindOptions}</select>
      <input data-field="magnitude" type="range" min="0.25" max="2" step="0.05"
             value="${row.kind === 'scale' ? row.magnitude : 1}"
             ${row.kind === 'scale' ? '' : 'hidden'}/>
      <input data-field="magnitude-num" type="number" step="0.05" value="${row.magnitude}"/>
      <input data-field="yearFrom" type="number" placeholder="from" value="${row.yearFrom ?? ''}"/>
      <input data-field="yearTo" type="number" placeholder="to" value="${row.yearTo ?? ''}"/>
      <button data-field="remove" title="remove row">×</button>
      ${errors.map((e) => `<span class="error">${e}</span>`).join('')}
    `;
    div.querySelector<HTMLSelectElement>('[data-field=node]')!.onchange = (ev) => {
      row.node = (ev.target as HTMLSelectElement).value;
      renderDraft();
    };
    div.querySelector<HTMLSelectElement>('[data-field=kind]')!.onchange = (ev) => {
      row.kind = (ev.target as HTMLSelectElement).value as typeof row.kind;
      renderDraft();
    };
    div.querySelector<HTMLInputElement>('[data-field=magnitude]')!.oninput = (ev) => {
      row.magnitude = Number((ev.target as HTMLInputElement).value);
      renderDraft();
    };
    div.querySelector<HTMLInputElement>('[data-field=magnitude-num]')!.onchange = (ev) => {
      row.magnitude = Number((ev.target as HTMLInputElement).value);
      renderDraft();
    };
    div.querySelector<HTMLInputElement>('[data-field=yearFrom]')!.onchange = (ev) => {
      const raw = (ev.target as HTMLInputElement).value;
      row.yearFrom = raw === '' ? null : Number(raw);
      renderDraft();
    };
    div.querySelector<HTMLInputElement>('[data-field=yearTo]')!.onchange = (ev) => {
      const raw = (ev.target as HTMLInputElement).value;
      row.yearTo = raw === '' ? null : Number(raw);
      renderDraft();
    };
    div.querySelector<HTMLButtonElement>('[data-field=remove]')!.onclick = () => {
      state.draft.rows.splice(i, 1);
      renderDraft();
    };
    holder.appendChild(div);
  });
  el<HTMLSpanElement>('name-error').textContent = check.nameError ?? '';
  const submit = el<HTMLButtonElement>('submit');
  submit.disabled = !check.canSubmit || state.busy;
  submit.title = check.canSubmit ? '' : 'add at least one valid intervention';
}

async function refreshRuns() {
  const index = await client.listRuns();
  const list = el<HTMLUListElement>('run-list');
  list.innerHTML = '';
  for (const entry of index.slice().reverse()) {
    const li = document.createElement('li');
    li.innerHTML =
      `<code>${entry.run_id}</code> ${entry.status} ` +
      `<span class="muted">seed ${entry.seed}, n=${entry.n_samples}, ` +
      `[${entry.policies.join(', ')}]</span> <button>show</button>`;
    li.querySelector('button')!.onclick = () => selectRun(entry.run_id);
    list.appendChild(li);
  }
}

async function selectRun(runId: string) {
  try {
    const record = await client.getRun(runId);
    const already = state.selectedRuns.findIndex((r) => r.run_id === runId);
    if (already === -1) state.selectedRuns.push(record);
    else state.selectedRuns[already] = record;
    renderComparison();
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      setBanner(`run ${runId} not found`);
    } else if (err instanceof ApiError) {
      setBanner(err.detail);
    }
  }
}

function renderComparison() {
  const view = buildComparison(state.selectedRuns, 'P1');
  const holder = el<HTMLDivElement>('comparison');
  holder.innerHTML = `<p class="muted">${ORIENTATION_NOTE}</p>`;
  for (const run of view.runs) {
    const section = document.createElement('section');
    const badge = view.showSeedBadges
      ? ` <span class="badge">seed ${run.seed}</span>`
      : '';
    section.innerHTML = `<h3><code>${run.runId}</code>${badge}</h3>`;
    section.innerHTML += barChartSvg(
      run.bars,
      `expected utility ± 1.96 SE (n=${run.nSamples}; best: ${run.best ?? '-'})`,
    );
    if (run.deltas.length > 0) {
      section.innerHTML += `<p class="muted">vs P1: ${run.deltas
        .map((d) => `${d.policy} ${d.deltaEu >= 0 ? '+' : ''}${d.deltaEu.toFixed(4)}`)
        .join(', ')}</p>`;
    }
    const histHolder = document.createElement('div');
    histHolder.className = 'hist-grid';
    for (const [policy, hist] of Object.entries(run.histograms)) {
      const cell = document.createElement('div');
      cell.innerHTML = histogramSvg(hist, `${policy} utility distribution`);
      histHolder.appendChild(cell);
    }
    section.appendChild(histHolder);
    holder.appendChild(section);
  }
}

async function submitDraft() {
  state.busy = true;
  renderDraft();
  try {
    const n = Number(el<HTMLInputElement>('mc-n').value) || 10000;
    const seed = Number(el<HTMLInputElement>('mc-seed').value) || 42;
    const runId = await buildAndSubmitPolicy(
      client,
      state.draft,
      { n, seed, compareWith: ['P1'] },
      state.nodes,
    );
    setBanner(null);
    el<HTMLSpanElement>('last-run').textContent = `run ${runId}`;
    await waitForRun(client, runId);
    await refreshRuns();
    await selectRun(runId);
  } catch (err) {
    if (err instanceof ApiError) setBanner(err.detail);
    else setBanner(String(err));
  } finally {
    state.busy = false;
    renderDraft();
  }
}

export async function start() {
  el<HTMLButtonElement>('add-row').onclick = () => {
    state.draft.rows.push(blankRow());
    renderDraft();
  };
  el<HTMLInputElement>('policy-name').oninput = (ev) => {
    state.draft.name = (ev.target as HTMLInputElement).value;
    renderDraft();
  };
  el<HTMLInputElement>('policy-desc').oninput = (ev) => {
    state.draft.description = (ev.target as HTMLInputElement).value;
  };
  el<HTMLButtonElement>('submit').onclick = () => void submitDraft();
  el<HTMLButtonElement>('banner-close').onclick = () => setBanner(null);
  el<HTMLButtonElement>('refresh-runs').onclick = () => void refreshRuns();
  renderDraft();
  try {
    await loadNetwork();
    await refreshRuns();
  } catch (err) {
    setBanner(err instanceof ApiError ? err.detail : String(err));
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void start();
}
