/** A minimal virtual node tree: renderable to DOM in the browser and to a
 * string in tests, so view construction stays testable without a DOM. */

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: (VNode | string)[];
  on?: Record<string, (event: Event) => void>;
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: (VNode | string)[] = [],
  on?: Record<string, (event: Event) => void>,
): VNode {
  return { tag, attrs, children, on };
}

export function renderToString(node: VNode | string, indent = ''): string {
  if (typeof node === 'string') {
    return indent + JSON.stringify(node);
  }
  const attrs = Object.entries(node.attrs)
    .map(([k, v]) => ` ${k}=${JSON.stringify(v)}`)
    .join('');
  if (node.children.length === 0) {
    return `${indent}<${node.tag}${attrs}/>`;
  }
  const inner = node.children.map((c) => renderToString(c, indent + '  ')).join('\n');
  return `${indent}<${node.tag}${attrs}>\n${inner}\n${indent}</${node.tag}>`;
}

/** Browser-side materialization; not exercised in the node test runner. */
export function mount(node: VNode | string, parent: Element): void {
  const doc = parent.ownerDocument;
  if (typeof node === 'string') {
    parent.appendChild(doc.createTextNode(node));
    return;
  }
  const el = doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    el.setAttribute(key, value);
  }
  if (node.on) {
    for (const [event, handler] of Object.entries(node.on)) {
      el.addEventListener(event, handler);
    }
  }
  for (const child of node.children) {
    mount(child, el);
  }
  parent.appendChild(el);
}
