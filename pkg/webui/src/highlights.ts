/** Hover cross-referencing between annotations, sequent formulas, origins.
 *
 * Hovering any element of the closure highlights the whole closure: the
 * inline annotation, its formula in the fallback sequent, and its origin
 * spans in the source (the latter in a distinct accent color).
 */

import { formulaId } from './model.js';
import type { GoalViewJson, HoverTarget, SpanJson } from './model.js';

export interface HighlightSet {
  annotations: number[]; // indexes into view.annotations
  formulaIds: string[]; // fallback sequent formula ids (A1, S2, ...)
  originSpans: SpanJson[]; // rendered in the accent (magenta) style
}

const EMPTY: HighlightSet = { annotations: [], formulaIds: [], originSpans: [] };

function spansOverlap(span: SpanJson, line: number, startCol: number, endCol: number): boolean {
  if (line < span.startLine || line > span.endLine) return false;
  const from = line === span.startLine ? span.startCol : 1;
  const to = line === span.endLine ? span.endCol : Number.MAX_SAFE_INTEGER;
  return startCol < to && endCol > from;
}

export function computeHighlights(view: GoalViewJson | null, target: HoverTarget | null): HighlightSet {
  if (!view || !target) return EMPTY;
  let seeds: number[] = [];
  if (target.kind === 'annotation') {
    if (target.index >= 0 && target.index < view.annotations.length) {
      seeds = [target.index];
    }
  } else if (target.kind === 'sequent') {
    seeds = view.annotations
      .map((a, i) => [a, i] as const)
      .filter(([a]) => formulaId(a.sequentRef) === target.formulaId)
      .map(([, i]) => i);
  } else {
    seeds = view.annotations
      .map((a, i) => [a, i] as const)
      .filter(([a]) =>
        a.originSpans.some((s) => spansOverlap(s, target.line, target.startCol, target.endCol)))
      .map(([, i]) => i);
  }
  if (seeds.length === 0) return EMPTY;
  const formulaIds = new Set<string>();
  const spans: SpanJson[] = [];
  for (const i of seeds) {
    const ann = view.annotations[i];
    formulaIds.add(formulaId(ann.sequentRef));
    for (const span of ann.originSpans) spans.push(span);
  }
  return {
    annotations: seeds,
    formulaIds: [...formulaIds].sort(),
    originSpans: spans,
  };
}
