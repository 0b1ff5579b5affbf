/** Proof tree panel: every node shown, non-renderable ones marked. */

import type { TreeJson, TreeNodeJson } from './model.js';
import { h } from './vnode.js';
import type { VNode } from './vnode.js';

export function renderTree(
  tree: TreeJson | null,
  selected: number | null,
  onSelect?: (id: number) => void,
  onPrune?: (id: number) => void,
): VNode {
  if (!tree) return h('div', { class: 'tree empty' }, ['no proof started']);

  function nodeView(node: TreeNodeJson): VNode {
    const classes = ['tree-node'];
    if (node.closed) classes.push('closed');
    if (node.open) classes.push('open-goal');
    if (!node.renderable) classes.push('not-renderable');
    if (node.id === selected) classes.push('selected');
    const label = node.branchLabel || (node.id === 0 ? 'proof obligation' : '');
    const parts = [
      node.closed ? '✓' : node.open ? '○' : '·',
      `#${node.id}`,
      label,
      node.rule ? `[${node.rule}]` : '',
      node.renderable ? '' : '(sequent only)',
    ].filter(Boolean);
    const on = onSelect
      ? {
          click: (e: Event) => {
            e.stopPropagation();
            onSelect(node.id);
          },
          contextmenu: (e: Event) => {
            e.preventDefault();
            e.stopPropagation();
            onPrune?.(node.id);
          },
        }
      : undefined;
    return h('div', { class: classes.join(' '), 'data-node': String(node.id) }, [
      h('div', { class: 'tree-label' }, [parts.join(' ')], on as never),
      ...node.children.map(nodeView),
    ]);
  }

  return h('div', { class: 'tree' }, [
    h('div', { class: 'tree-header' },
      [`${tree.method}: ${tree.closed ? 'closed' : `${tree.openGoals.length} open`}`]),
    nodeView(tree.root),
  ]);
}
