// Typed client for the engine's HTTP API. Non-2xx responses raise ApiError
// with the server's diagnostic detail so the UI can surface it inline.

import type {
  EvaluateRequest,
  EvaluateResponse,
  NetworkDocument,
  PoliciesResponse,
  PolicyDocument,
  RunIndexEntry,
  RunRecord,
  SeriesResponse,
} from './types.js';
import { draftToDocument, validateDraft, type PolicyDraft } from './policy.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base = '',
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
        else if (body) detail = JSON.stringify(body);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  getNetwork(): Promise<NetworkDocument> {
    return this.request('/network');
  }

  getSeries(node: string): Promise<SeriesResponse> {
    return this.request(`/series/${encodeURIComponent(node)}`);
  }

  getPolicies(): Promise<PoliciesResponse> {
    return this.request('/policies');
  }

  savePolicy(doc: PolicyDocument): Promise<{ saved: string }> {
    return this.request('/policies', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(doc),
    });
  }

  evaluate(req: EvaluateRequest): Promise<EvaluateResponse> {
    return this.request('/evaluate', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(req),
    });
  }

  listRuns(): Promise<RunIndexEntry[]> {
    return this.request('/runs');
  }

  getRun(runId: string): Promise<RunRecord> {
    return this.request(`/runs/${encodeURIComponent(runId)}`);
  }
}

export interface SubmitOptions {
  n: number;
  seed: number;
  compareWith?: string[]; // extra policy names evaluated alongside the draft
}

/** Validate, save, and evaluate a draft; resolves to the run id. */
export async function buildAndSubmitPolicy(
  client: ApiClient,
  draft: PolicyDraft,
  options: SubmitOptions,
  knownNodes?: string[],
): Promise<string> {
  const check = validateDraft(draft, knownNodes);
  if (!check.canSubmit) {
    const first = check.nameError ?? check.rowErrors[0]?.message ?? 'draft is empty';
    throw new ApiError(0, `draft invalid: ${first}`);
  }
  const doc = draftToDocument(draft);
  await client.savePolicy(doc);
  const policies: (string | PolicyDocument)[] = [
    ...(options.compareWith ?? []),
    doc.name,
  ];
  const res = await client.evaluate({ policies, n: options.n, seed: options.seed });
  return res.run_id;
}

/** Poll a run until it leaves the pending state (202-and-poll mode). */
export async function waitForRun(
  client: ApiClient,
  runId: string,
  intervalMs = 500,
  maxTries = 240,
): Promise<RunRecord> {
  for (let i = 0; i < maxTries; i++) {
    const record = await client.getRun(runId);
    if (record.status !== 'pending') return record;
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
  throw new ApiError(0, `run ${runId} still pending after ${maxTries} polls`);
}
