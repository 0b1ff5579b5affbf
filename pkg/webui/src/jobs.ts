/** Poll a macro job until it leaves the running state. */

import type { Api } from './api.js';

export interface JobOutcome {
  status: string;
  proofClosed: boolean;
  openGoals: number[];
  error?: string;
}

export async function pollJob(
  api: Api,
  sid: string,
  jobId: string,
  intervalMs = 150,
  sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
): Promise<JobOutcome> {
  for (;;) {
    const job = await api.job(sid, jobId);
    if (job.status === 'error') {
      return { status: 'error', proofClosed: false, openGoals: [], error: job.error };
    }
    if (job.status === 'done') {
      return {
        status: 'done',
        proofClosed: job.result?.proofClosed ?? false,
        openGoals: job.openGoals ?? job.result?.openGoals ?? [],
      };
    }
    await sleep(intervalMs);
  }
}
