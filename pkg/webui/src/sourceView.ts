/** The source view: numbered code lines with executed-line shading and the
 * generated assumptions/assertions inlined on gray, unnumbered rows. */

import { computeHighlights } from './highlights.js';
import type { HighlightSet } from './highlights.js';
import { computeLineShading, shadeColor } from './shading.js';
import type { LineShade } from './shading.js';
import type { AnnotationJson, GoalViewJson, HoverTarget } from './model.js';
import { h } from './vnode.js';
import type { VNode } from './vnode.js';

export interface SourceViewHooks {
  onHover?: (target: HoverTarget | null) => void;
  onAnnotationMenu?: (annotationIndex: number, x: number, y: number) => void;
}

function annotationRow(
  ann: AnnotationJson,
  index: number,
  indent: string,
  highlights: HighlightSet,
  hooks: SourceViewHooks,
): VNode {
  const classes = ['annotation', ann.kind.toLowerCase()];
  if (highlights.annotations.includes(index)) classes.push('highlight');
  if (ann.status === 'Untranslatable') classes.push('untranslatable');
  const keyword = ann.kind === 'Assume' ? 'assume' : 'assert';
  const children: (VNode | string)[] = [
    h('span', { class: 'gutter' }, []),  // deliberately no line number
    h('span', { class: 'annotation-text' },
      [`${indent}//@ ${keyword} ${ann.text};`]),
  ];
  if (ann.status === 'Untranslatable') {
    children.push(
      h('span', { class: 'untranslatable-message', role: 'alert' },
        [`cannot be shown at source level: ${ann.message}`]),
    );
  }
  const on = hooks.onHover
    ? {
        mouseenter: () => hooks.onHover!({ kind: 'annotation', index }),
        mouseleave: () => hooks.onHover!(null),
        contextmenu: (e: Event) => {
          e.preventDefault();
          const me = e as MouseEvent;
          hooks.onAnnotationMenu?.(index, me.clientX, me.clientY);
        },
      }
    : undefined;
  return h('div', { class: classes.join(' '), 'data-annotation': String(index) },
           children, on as never);
}

function sourceRow(
  lineNo: number,
  text: string,
  shade: LineShade | undefined,
  spanHighlight: boolean,
): VNode {
  const classes = ['source-line'];
  if (shade) classes.push('executed');
  if (shade?.active) classes.push('active');
  if (spanHighlight) classes.push('origin-highlight');
  const style = shade ? `background-color: ${shadeColor(shade)}` : '';
  return h('div', { class: classes.join(' '), style, 'data-line': String(lineNo) }, [
    h('span', { class: 'gutter' }, [String(lineNo)]),
    h('span', { class: 'code' }, [text || ' ']),
  ]);
}

function indentation(text: string): string {
  const match = /^[ \t]*/.exec(text);
  return match ? match[0] : '';
}

export function renderSourceView(
  source: string,
  view: GoalViewJson | null,
  hover: HoverTarget | null,
  hooks: SourceViewHooks = {},
): VNode {
  const lines = source.split('\n');
  if (!view) {
    return h('div', { class: 'source-view' },
      lines.map((text, i) => sourceRow(i + 1, text, undefined, false)));
  }
  const highlights = computeHighlights(view, hover);
  const shading = new Map(computeLineShading(view).map((s) => [s.line, s]));
  const before = new Map<number, number[]>();
  const after = new Map<number, number[]>();
  view.annotations.forEach((ann, index) => {
    const bucket = ann.placement === 'before' ? before : after;
    const list = bucket.get(ann.anchorLine) ?? [];
    list.push(index);
    bucket.set(ann.anchorLine, list);
  });
  const highlightedLines = new Set<number>();
  for (const span of highlights.originSpans) {
    for (let l = span.startLine; l <= span.endLine; l++) highlightedLines.add(l);
  }
  const rows: VNode[] = [];
  lines.forEach((text, i) => {
    const lineNo = i + 1;
    const indent = indentation(text);
    for (const index of before.get(lineNo) ?? []) {
      rows.push(annotationRow(view.annotations[index], index, indent, highlights, hooks));
    }
    rows.push(sourceRow(lineNo, text, shading.get(lineNo), highlightedLines.has(lineNo)));
    for (const index of after.get(lineNo) ?? []) {
      rows.push(annotationRow(view.annotations[index], index, indent, highlights, hooks));
    }
  });
  return h('div', { class: 'source-view' }, rows);
}

/** The collapsible fallback sequent panel (collapsed by default). */
export function renderSequentPanel(
  fallback: string,
  hover: HoverTarget | null,
  view: GoalViewJson | null,
  hooks: SourceViewHooks = {},
  collapsed = true,
): VNode {
  const highlights = computeHighlights(view, hover);
  const rows = fallback.split('\n').map((line) => {
    const id = line.split(':')[0];
    const isFormula = /^[AS]\d+$/.test(id);
    const classes = ['sequent-line'];
    if (isFormula && highlights.formulaIds.includes(id)) classes.push('highlight');
    const on = hooks.onHover && isFormula
      ? {
          mouseenter: () => hooks.onHover!({ kind: 'sequent', formulaId: id }),
          mouseleave: () => hooks.onHover!(null),
        }
      : undefined;
    return h('div', { class: classes.join(' '), 'data-formula': isFormula ? id : '' },
             [line], on as never);
  });
  return h('details', collapsed ? { class: 'sequent-panel' } : { class: 'sequent-panel', open: '' }, [
    h('summary', {}, ['sequent (fallback view)']),
    h('pre', { class: 'sequent' }, rows),
  ]);
}
