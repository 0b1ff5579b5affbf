import { describe, expect, it } from 'vitest';

import { computeHighlights } from '../src/highlights.js';
import { listing3BoundsView } from './fixtures.js';

describe('hover cross-referencing (B1)', () => {
  it('hovering the requires assume highlights the requires clause span', () => {
    const view = listing3BoundsView();
    const set = computeHighlights(view, { kind: 'annotation', index: 0 });
    expect(set.annotations).toEqual([0]);
    expect(set.formulaIds).toEqual(['A8']);
    expect(set.originSpans).toEqual([
      { file: 'listing3.mjava', startLine: 3, startCol: 16, endLine: 3, endCol: 23 },
    ]);
  });

  it('hovering the sequent formula highlights the annotation back', () => {
    const view = listing3BoundsView();
    const set = computeHighlights(view, { kind: 'sequent', formulaId: 'A8' });
    expect(set.annotations).toEqual([0]);
    expect(set.originSpans.map((s) => s.startLine)).toEqual([3]);
  });

  it('the closure is a bijection on both directions', () => {
    const view = listing3BoundsView();
    for (let i = 0; i < view.annotations.length; i++) {
      const forward = computeHighlights(view, { kind: 'annotation', index: i });
      expect(forward.annotations).toEqual([i]);
      const id = forward.formulaIds[0];
      const back = computeHighlights(view, { kind: 'sequent', formulaId: id });
      expect(back.annotations).toContain(i);
    }
  });

  it('hovering an origin span in the source highlights its annotation', () => {
    const view = listing3BoundsView();
    const set = computeHighlights(view, {
      kind: 'span', line: 3, startCol: 18, endCol: 20,
    });
    expect(set.annotations).toEqual([0]);
  });

  it('hover on plain code yields the empty set', () => {
    const view = listing3BoundsView();
    const set = computeHighlights(view, { kind: 'span', line: 8, startCol: 1, endCol: 4 });
    expect(set).toEqual({ annotations: [], formulaIds: [], originSpans: [] });
    expect(computeHighlights(view, null).annotations).toEqual([]);
    expect(computeHighlights(null, { kind: 'annotation', index: 0 }).annotations)
      .toEqual([]);
  });
});
