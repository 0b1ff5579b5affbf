/** Context menu: the macros and source-level commands, mapped one-to-one
 * onto documented API calls. */

import type { Api } from './api.js';
import type { AnnotationJson, GoalViewJson } from './model.js';

export interface MenuItem {
  label: string;
  /** null = needs user input collected by the shell before dispatch */
  prompt: string | null;
  dispatch: (api: Api, sid: string, goalId: number, input?: string) => Promise<unknown>;
}

export function menuItems(view: GoalViewJson | null, annotation: AnnotationJson | null): MenuItem[] {
  const items: MenuItem[] = [
    {
      label: 'Full auto',
      prompt: null,
      dispatch: (api, sid, goalId) => api.startMacro(sid, 'FullAuto', goalId),
    },
    {
      label: 'Finish symbolic execution',
      prompt: null,
      dispatch: (api, sid, goalId) => api.startMacro(sid, 'SymbolicExecutionOnly', goalId),
    },
    {
      label: 'Propositional simplification',
      prompt: null,
      dispatch: (api, sid, goalId) => api.startMacro(sid, 'PropositionalOnly', goalId),
    },
    {
      label: 'Update simplification',
      prompt: null,
      dispatch: (api, sid, goalId) => api.startMacro(sid, 'UpdateSimplification', goalId),
    },
    {
      label: 'Cut ...',
      prompt: 'Case distinction formula',
      dispatch: (api, sid, goalId, input) =>
        api.command(sid, goalId, 'cut', [input ?? ''], {}),
    },
    {
      label: 'Split conjunction',
      prompt: null,
      dispatch: (api, sid, goalId) => api.command(sid, goalId, 'split', [], {}),
    },
  ];
  if (annotation) {
    items.push({
      label: `Hide '${annotation.text}'`,
      prompt: null,
      dispatch: (api, sid, goalId) =>
        api.command(sid, goalId, 'hide', [annotation.text], {}),
    });
    items.push({
      label: `Instantiate '${annotation.text}' with ...`,
      prompt: 'Instantiation term',
      dispatch: (api, sid, goalId, input) =>
        api.command(sid, goalId, 'instantiate', [annotation.text], { inst: input ?? '' }),
    });
    items.push({
      label: `Witness '${annotation.text}' as ...`,
      prompt: 'Witness name',
      dispatch: (api, sid, goalId, input) =>
        api.command(sid, goalId, 'witness', [annotation.text], { as: input ?? '' }),
    });
  }
  items.push({
    label: 'Download recorded script',
    prompt: null,
    dispatch: (api, sid, goalId) => api.recordScript(sid, goalId),
  });
  return items;
}
