// Policy drafts: the client-side editing model and its loss-free mapping
// onto the policy document schema. Validation mirrors the engine's
// invariants so a draft that passes here is accepted by the server.

import type { InterventionKind, PolicyDocument } from './types.js';

export interface DraftRow {
  node: string;
  kind: InterventionKind;
  magnitude: number;
  yearFrom: number | null;
  yearTo: number | null;
}

export interface PolicyDraft {
  name: string;
  description: string;
  rows: DraftRow[];
}

export interface RowError {
  row: number;
  field: 'node' | 'kind' | 'magnitude' | 'years';
  message: string;
}

export interface ValidationResult {
  valid: boolean;
  canSubmit: boolean;
  nameError: string | null;
  rowErrors: RowError[];
}

export const KINDS: InterventionKind[] = ['set', 'scale', 'shift'];

export function emptyDraft(): PolicyDraft {
  return { name: '', description: '', rows: [] };
}

export function blankRow(node = ''): DraftRow {
  return { node, kind: 'scale', magnitude: 1.0, yearFrom: null, yearTo: null };
}

export function validateDraft(draft: PolicyDraft, knownNodes?: string[]): ValidationResult {
  const rowErrors: RowError[] = [];
  let nameError: string | null = null;
  if (!draft.name.trim()) {
    nameError = 'policy needs a name';
  }
  draft.rows.forEach((row, i) => {
    if (!row.node) {
      rowErrors.push({ row: i, field: 'node', message: 'pick a variable' });
    } else if (knownNodes && !knownNodes.includes(row.node)) {
      rowErrors.push({ row: i, field: 'node', message: `unknown variable ${row.node}` });
    }
    if (!KINDS.includes(row.kind)) {
      rowErrors.push({ row: i, field: 'kind', message: `unknown kind ${row.kind}` });
    }
    if (!Number.isFinite(row.magnitude)) {
      rowErrors.push({ row: i, field: 'magnitude', message: 'magnitude must be a number' });
    } else if (row.kind === 'scale' && row.magnitude <= 0) {
      rowErrors.push({ row: i, field: 'magnitude', message: 'scale must be > 0' });
    }
    const hasFrom = row.yearFrom !== null;
    const hasTo = row.yearTo !== null;
    if (hasFrom !== hasTo) {
      rowErrors.push({ row: i, field: 'years', message: 'give both years or neither' });
    } else if (hasFrom && hasTo && (row.yearFrom as number) > (row.yearTo as number)) {
      rowErrors.push({ row: i, field: 'years', message: 'year range is empty' });
    }
  });
  const valid = nameError === null && rowErrors.length === 0;
  // an empty draft is well-formed but there is nothing to submit
  const canSubmit = valid && draft.rows.length > 0;
  return { valid, canSubmit, nameError, rowErrors };
}

export function draftToDocument(draft: PolicyDraft): PolicyDocument {
  return {
    name: draft.name,
    description: draft.description,
    interventions: draft.rows.map((row) => ({
      node: row.node,
      kind: row.kind,
      magnitude: row.magnitude,
      years:
        row.yearFrom !== null && row.yearTo !== null
          ? [row.yearFrom, row.yearTo]
          : null,
    })),
  };
}

export function documentToDraft(doc: PolicyDocument): PolicyDraft {
  return {
    name: doc.name,
    description: doc.description ?? '',
    rows: doc.interventions.map((iv) => ({
      node: iv.node,
      kind: iv.kind,
      magnitude: iv.magnitude,
      yearFrom: iv.years ? iv.years[0] : null,
      yearTo: iv.years ? iv.years[1] : null,
    })),
  };
}
