/** B3: the context-menu FullAuto flow drives the proof to the closed state
 * using only documented API calls, verified via the request log. */

import { describe, expect, it } from 'vitest';

import { Api } from '../src/api.js';
import { pollJob } from '../src/jobs.js';
import { menuItems } from '../src/menu.js';
import type { FetchLike } from '../src/api.js';

const LISTING2 = `class Demo {
  int m(int n) {
    //@ assume n >= 0;
    n++;
    //@ assert n > 0;
    return n;
  }
}`;

/** An in-memory stand-in for the verification server. */
function fakeServer() {
  let polls = 0;
  let closed = false;
  const routes: [RegExp, string, (body: any) => [number, unknown]][] = [
    [/^\/sessions$/, 'POST', (body) => [200, {
      sessionId: 's1',
      methods: [{ class: 'Demo', name: 'm', line: 2, hasContract: false }],
    }]],
    [/^\/sessions\/s1\/proofs$/, 'POST', () => [200, {
      method: 'm', closed: false, openGoals: [0],
      root: { id: 0, branchLabel: '', rule: null, closed: false, open: true,
              renderable: false, children: [] },
    }]],
    [/^\/sessions\/s1\/macro$/, 'POST', (body) => {
      expect(body.kind).toBe('FullAuto');
      return [200, { jobId: 'j1' }];
    }],
    [/^\/sessions\/s1\/jobs\/j1$/, 'GET', () => {
      polls += 1;
      if (polls < 3) return [200, { jobId: 'j1', status: 'running' }];
      closed = true;
      return [200, {
        jobId: 'j1', status: 'done',
        result: { proofClosed: true, openGoals: [] }, openGoals: [],
      }];
    }],
    [/^\/sessions\/s1\/tree$/, 'GET', () => [200, {
      method: 'm', closed, openGoals: [],
      root: { id: 0, branchLabel: '', rule: 'expandEntry', closed, open: false,
              renderable: false, children: [] },
    }]],
  ];
  const fetchImpl: FetchLike = async (url, init) => {
    const method = init?.method ?? 'GET';
    const path = url.toString();
    for (const [pattern, m, handler] of routes) {
      if (m === method && pattern.test(path)) {
        const body = init?.body ? JSON.parse(init.body as string) : undefined;
        const [status, data] = handler(body);
        return new Response(JSON.stringify(data), { status });
      }
    }
    return new Response(JSON.stringify({ code: 'not_found', message: path }),
                        { status: 404 });
  };
  return { fetchImpl };
}

const DOCUMENTED = [
  ['POST', /^\/sessions$/],
  ['POST', /^\/sessions\/[^/]+\/proofs$/],
  ['GET', /^\/sessions\/[^/]+\/tree$/],
  ['POST', /^\/sessions\/[^/]+\/select$/],
  ['GET', /^\/sessions\/[^/]+\/goals\/\d+\/view$/],
  ['GET', /^\/sessions\/[^/]+\/goals\/\d+\/sequent$/],
  ['GET', /^\/sessions\/[^/]+\/goals\/\d+\/applicable.*$/],
  ['POST', /^\/sessions\/[^/]+\/goals\/\d+\/command$/],
  ['POST', /^\/sessions\/[^/]+\/goals\/\d+\/rule$/],
  ['POST', /^\/sessions\/[^/]+\/macro$/],
  ['GET', /^\/sessions\/[^/]+\/jobs\/[^/]+$/],
  ['POST', /^\/sessions\/[^/]+\/jobs\/[^/]+\/cancel$/],
  ['POST', /^\/sessions\/[^/]+\/replay$/],
  ['GET', /^\/sessions\/[^/]+\/record.*$/],
  ['POST', /^\/sessions\/[^/]+\/prune$/],
  ['POST', /^\/sessions\/[^/]+\/save$/],
  ['POST', /^\/sessions\/[^/]+\/load$/],
] as const;

describe('full auto flow (B3)', () => {
  it('runs FullAuto to the closed state with documented calls only', async () => {
    const { fetchImpl } = fakeServer();
    const api = new Api(fetchImpl);

    const created = await api.createSession(LISTING2, 'listing2.mjava');
    const tree = await api.startProof(created.sessionId, 'm');
    expect(tree.openGoals).toEqual([0]);

    const fullAuto = menuItems(null, null).find((i) => i.label === 'Full auto')!;
    const started = (await fullAuto.dispatch(api, created.sessionId, 0)) as {
      jobId: string;
    };
    const outcome = await pollJob(api, created.sessionId, started.jobId, 1,
                                  async () => {});
    expect(outcome.proofClosed).toBe(true);

    const finalTree = await api.tree(created.sessionId);
    expect(finalTree.closed).toBe(true);

    // every request the client made is one of the documented endpoints
    for (const entry of api.log) {
      const ok = DOCUMENTED.some(
        ([m, p]) => m === entry.method && p.test(entry.path));
      expect(ok, `${entry.method} ${entry.path} is not documented`).toBe(true);
    }
    expect(api.log.length).toBeGreaterThanOrEqual(5);
    expect(api.log.filter((e) => e.path.includes('/jobs/')).length)
      .toBeGreaterThanOrEqual(3);
  });

  it('every menu item maps to exactly one API call', async () => {
    const { fetchImpl } = fakeServer();
    const api = new Api(fetchImpl);
    await api.createSession(LISTING2, 'x.mjava');
    const before = api.log.length;
    const items = menuItems(null, null);
    const auto = items.find((i) => i.label === 'Full auto')!;
    await auto.dispatch(api, 's1', 0);
    expect(api.log.length).toBe(before + 1);
  });

  it('api errors surface with their machine-readable code', async () => {
    const { fetchImpl } = fakeServer();
    const api = new Api(fetchImpl);
    await expect(api.tree('nosuch')).rejects.toMatchObject({
      status: 404,
      code: 'not_found',
    });
  });
});
