/** Typed client over the session HTTP API.
 *
 * Every method performs exactly one documented request; an optional request
 * log records (method, path) pairs so interactions stay auditable for
 * script recording and tests.
 */

import type { GoalViewJson, MethodInfo, TreeJson } from './model.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface RequestLogEntry {
  method: string;
  path: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class Api {
  readonly log: RequestLogEntry[] = [];

  constructor(
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
    private base = '',
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    this.log.push({ method, path });
    const init: RequestInit = { method, headers: { 'content-type': 'application/json' } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchImpl(this.base + path, init);
    const data = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, data.code ?? 'error', data.message ?? 'request failed');
    }
    return data as T;
  }

  createSession(source: string, path: string) {
    return this.request<{ sessionId: string; methods: MethodInfo[] }>(
      'POST', '/sessions', { source, path });
  }

  startProof(sid: string, method: string) {
    return this.request<TreeJson>('POST', `/sessions/${sid}/proofs`, { method });
  }

  tree(sid: string) {
    return this.request<TreeJson>('GET', `/sessions/${sid}/tree`);
  }

  selectGoal(sid: string, goalId: number) {
    return this.request<{ selected: number }>('POST', `/sessions/${sid}/select`, { goalId });
  }

  goalView(sid: string, goalId: number) {
    return this.request<GoalViewJson>('GET', `/sessions/${sid}/goals/${goalId}/view`);
  }

  sequent(sid: string, goalId: number) {
    return this.request<{ goalId: number; text: string }>(
      'GET', `/sessions/${sid}/goals/${goalId}/sequent`);
  }

  applicable(sid: string, goalId: number, side: string, index: number, path: string) {
    return this.request<{ rules: { id: string }[]; macros: string[]; commands: string[] }>(
      'GET',
      `/sessions/${sid}/goals/${goalId}/applicable?side=${side}&index=${index}&path=${path}`);
  }

  command(sid: string, goalId: number, name: string, positional: string[],
          options: Record<string, string>) {
    return this.request<{ openGoals: number[]; closed: boolean }>(
      'POST', `/sessions/${sid}/goals/${goalId}/command`, { name, positional, options });
  }

  applyRule(sid: string, goalId: number, rule: string, side: string,
            index: number, path: number[]) {
    return this.request<{ openGoals: number[]; closed: boolean }>(
      'POST', `/sessions/${sid}/goals/${goalId}/rule`, { rule, side, index, path });
  }

  startMacro(sid: string, kind: string, goalId?: number, maxRuleApps?: number) {
    return this.request<{ jobId: string }>('POST', `/sessions/${sid}/macro`, {
      kind, goalId: goalId ?? null, maxRuleApps: maxRuleApps ?? null });
  }

  job(sid: string, jobId: string) {
    return this.request<{
      jobId: string; status: string; error?: string;
      result?: { proofClosed: boolean; openGoals: number[] };
      openGoals?: number[];
    }>('GET', `/sessions/${sid}/jobs/${jobId}`);
  }

  cancelJob(sid: string, jobId: string) {
    return this.request<{ cancelling: boolean }>(
      'POST', `/sessions/${sid}/jobs/${jobId}/cancel`);
  }

  replay(sid: string, script: string, goalId?: number) {
    return this.request<{ status: string; openGoals: number[] }>(
      'POST', `/sessions/${sid}/replay`, { script, goalId: goalId ?? null });
  }

  recordScript(sid: string, goalId: number) {
    return this.request<{ script: string }>(
      'GET', `/sessions/${sid}/record?goalId=${goalId}`);
  }

  prune(sid: string, nodeId: number) {
    return this.request<{ openGoals: number[] }>(
      'POST', `/sessions/${sid}/prune`, { nodeId });
  }

  save(sid: string) {
    return this.request<Record<string, unknown>>('POST', `/sessions/${sid}/save`);
  }

  load(sid: string, document: Record<string, unknown>) {
    return this.request<{ openGoals: number[] }>(
      'POST', `/sessions/${sid}/load`, { document });
  }
}
