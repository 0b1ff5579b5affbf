/** Browser shell: wires the pure view builders to the API and the DOM.
 *
 * All state lives on the server; reloading the page and re-fetching the
 * selected goal reproduces the identical view.  One mutating request is in
 * flight at a time.
 */

import { Api, ApiError } from './api.js';
import { pollJob } from './jobs.js';
import { menuItems } from './menu.js';
import { emptyModel } from './model.js';
import type { HoverTarget, ViewModel } from './model.js';
import { renderSequentPanel, renderSourceView } from './sourceView.js';
import { renderTree } from './tree.js';
import { h, mount } from './vnode.js';
import type { VNode } from './vnode.js';

const api = new Api();
const model: ViewModel = emptyModel();
let mutationInFlight = false;

const EXAMPLE = `class Zero {
  /*@ public normal_behavior
    @ requires 0 <= to;
    @ assignable a[0..to];
    @ ensures (\\forall int i; 0 <= i < to; a[i] == 0);
    @*/
  void zero(int[] a, int to) {
    int j = 0;
    /*@ loop_invariant 0 <= j <= to
      @ && (\\forall int k; 0 <= k < j; a[k] == 0);
      @ assignable a[0..to];
      @ decreases a.length - j;
      @*/
    while (j < to) {
      a[j] = 0;
      ++j;
    }
  }
}
`;

function root(): Element {
  return document.getElementById('app')!;
}

function rerender() {
  const el = root();
  el.innerHTML = '';
  mount(view(), el);
}

async function guarded(work: () => Promise<void>) {
  if (mutationInFlight) {
    setStatus('a request is already running');
    return;
  }
  mutationInFlight = true;
  try {
    await work();
  } catch (e) {
    setStatus(e instanceof ApiError ? `${e.code}: ${e.message}` : String(e));
  } finally {
    mutationInFlight = false;
    rerender();
  }
}

let status = '';

function setStatus(text: string) {
  status = text;
  rerender();
}

async function refreshGoal() {
  if (!model.sessionId || model.selectedGoal === null) return;
  model.tree = await api.tree(model.sessionId);
  try {
    model.view = await api.goalView(model.sessionId, model.selectedGoal);
    model.viewError = null;
  } catch (e) {
    model.view = null;
    model.viewError = e instanceof ApiError ? e.message : String(e);
  }
}

function onHover(target: HoverTarget | null) {
  model.hover = target;
  rerender();
}

async function selectGoal(id: number) {
  await guarded(async () => {
    if (!model.sessionId) return;
    model.selectedGoal = id;
    await refreshGoal();
  });
}

async function runMenuItem(label: string, input?: string) {
  const annotation = null;
  const items = menuItems(model.view, annotation);
  const item = items.find((i) => i.label === label);
  if (!item || !model.sessionId || model.selectedGoal === null) return;
  await guarded(async () => {
    const result = await item.dispatch(api, model.sessionId!, model.selectedGoal!, input);
    const jobId = (result as { jobId?: string }).jobId;
    if (jobId) {
      model.pendingJob = jobId;
      rerender();
      const outcome = await pollJob(api, model.sessionId!, jobId);
      model.pendingJob = null;
      if (outcome.error) setStatus(outcome.error);
      if (outcome.openGoals.length > 0) model.selectedGoal = outcome.openGoals[0];
    }
    const script = (result as { script?: string }).script;
    if (script) downloadScript(script);
    await refreshGoal();
  });
}

function downloadScript(text: string) {
  const blob = new Blob([text], { type: 'text/plain' });
  const a = document.createElement('a');
  a.href = URL.createObjectURL(blob);
  a.download = 'proof.mproof-script';
  a.click();
}

function toolbar(): VNode {
  const buttons: VNode[] = [];
  if (model.sessionId && model.selectedGoal !== null) {
    for (const item of menuItems(model.view, null)) {
      buttons.push(
        h('button', { class: 'menu-item' }, [item.label], {
          click: () => {
            const input = item.prompt ? prompt(item.prompt) ?? undefined : undefined;
            if (item.prompt && input === undefined) return;
            void runMenuItem(item.label, input);
          },
        }),
      );
    }
  }
  return h('div', { class: 'toolbar' }, buttons);
}

function methodPicker(): VNode {
  return h('div', { class: 'methods' },
    model.methods.map((m) =>
      h('button', { class: 'method' }, [`${m.class}.${m.name}`], {
        click: () =>
          void guarded(async () => {
            const tree = await api.startProof(model.sessionId!, m.name);
            model.tree = tree;
            model.selectedGoal = tree.openGoals[0] ?? 0;
            await refreshGoal();
          }),
      })));
}

function view(): VNode {
  return h('div', { class: 'layout' }, [
    h('div', { class: 'sidebar' }, [
      h('h1', {}, ['mjverify']),
      h('textarea', { id: 'source', rows: '14' }, [model.source || EXAMPLE]),
      h('button', { class: 'primary' }, ['Load source'], {
        click: () =>
          void guarded(async () => {
            const text = (document.getElementById('source') as HTMLTextAreaElement).value;
            const created = await api.createSession(text, 'input.mjava');
            model.sessionId = created.sessionId;
            model.methods = created.methods;
            model.source = text;
            model.tree = null;
            model.view = null;
            model.selectedGoal = null;
          }),
      }),
      methodPicker(),
      renderTree(model.tree, model.selectedGoal, (id) => void selectGoal(id),
        (id) =>
          void guarded(async () => {
            await api.prune(model.sessionId!, id);
            model.selectedGoal = id;
            await refreshGoal();
          })),
      h('div', { class: 'status' }, [
        model.pendingJob
          ? h('span', {}, [
              'running... ',
              h('button', {}, ['cancel'], {
                click: () => void api.cancelJob(model.sessionId!, model.pendingJob!),
              }),
            ])
          : h('span', {}, [status]),
      ]),
    ]),
    h('div', { class: 'main' }, [
      toolbar(),
      model.viewError
        ? h('div', { class: 'view-error' },
            [`goal not renderable: ${model.viewError}`])
        : h('span', {}, []),
      renderSourceView(model.source || EXAMPLE, model.view, model.hover, {
        onHover,
      }),
      renderSequentPanel(
        model.view?.sequentFallback ?? '', model.hover, model.view, { onHover: onHover }),
    ]),
  ]);
}

rerender();
