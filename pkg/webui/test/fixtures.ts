/** A goal view shaped like the verifier's listing-3 bounds goal. */

import type { GoalViewJson } from '../src/model.js';

export const LISTING3_SOURCE = `class Zero {
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
}`;

export function listing3BoundsView(): GoalViewJson {
  return {
    goalId: 8,
    executedLines: [
      { line: 7, recencyRank: 0 },
      { line: 8, recencyRank: 1 },
      { line: 14, recencyRank: 2 },
    ],
    activeLine: 15,
    activeExecuted: false,
    branchLabelPath: ['Body Preserves Invariant', 'Index In Bounds'],
    sequentFallback: [
      'A1: wellFormed(heap)',
      'A8: to > -1',
      'A9: -1 * j_0 + to > 0',
      '==>',
      'S1: j_0 > -1 & -1 * j_0 + length(a) > 0',
    ].join('\n'),
    annotations: [
      {
        kind: 'Assume',
        text: '0 <= to',
        anchorLine: 15,
        placement: 'before',
        originSpans: [
          { file: 'listing3.mjava', startLine: 3, startCol: 16, endLine: 3, endCol: 23 },
        ],
        sequentRef: { side: 'ante', index: 7, conjunct: 0 },
        status: 'Verbatim',
        message: '',
        stateRefs: [],
        originKinds: ['requires'],
      },
      {
        kind: 'Assume',
        text: 'j < to',
        anchorLine: 15,
        placement: 'before',
        originSpans: [
          { file: 'listing3.mjava', startLine: 14, startCol: 12, endLine: 14, endCol: 18 },
        ],
        sequentRef: { side: 'ante', index: 8, conjunct: 0 },
        status: 'Verbatim',
        message: '',
        stateRefs: [],
        originKinds: ['loop_guard'],
      },
      {
        kind: 'Assert',
        text: '0 <= j < a.length',
        anchorLine: 15,
        placement: 'before',
        originSpans: [
          { file: 'listing3.mjava', startLine: 15, startCol: 7, endLine: 15, endCol: 11 },
        ],
        sequentRef: { side: 'succ', index: 0, conjunct: 0 },
        status: 'Retranslated',
        message: '',
        stateRefs: [],
        originKinds: ['assert'],
      },
      {
        kind: 'Assert',
        text: 'frame',
        anchorLine: 17,
        placement: 'after',
        originSpans: [],
        sequentRef: { side: 'succ', index: 1, conjunct: 0 },
        status: 'Untranslatable',
        message: 'the formula quantifies over heap locations (fields), which is not expressible at the specification level',
        stateRefs: [],
        originKinds: ['assignable'],
      },
    ],
  };
}
