/** Types mirroring the documented goal-view and tree JSON schemas. */

export interface SpanJson {
  file: string;
  startLine: number;
  startCol: number;
  endLine: number;
  endCol: number;
}

export interface SequentRef {
  side: 'ante' | 'succ';
  index: number;
  conjunct: number;
}

export interface AnnotationJson {
  kind: 'Assume' | 'Assert';
  text: string;
  anchorLine: number;
  placement: 'before' | 'after';
  originSpans: SpanJson[];
  sequentRef: SequentRef;
  status: 'Verbatim' | 'Retranslated' | 'Untranslatable';
  message: string;
  stateRefs: { subterm: string; line: number }[];
  originKinds: string[];
}

export interface ExecutedLine {
  line: number;
  recencyRank: number;
}

export interface GoalViewJson {
  goalId: number;
  executedLines: ExecutedLine[];
  activeLine: number | null;
  activeExecuted: boolean;
  annotations: AnnotationJson[];
  branchLabelPath: string[];
  sequentFallback: string;
}

export interface TreeNodeJson {
  id: number;
  branchLabel: string;
  rule: string | null;
  closed: boolean;
  open: boolean;
  renderable: boolean;
  children: TreeNodeJson[];
}

export interface TreeJson {
  method: string;
  closed: boolean;
  root: TreeNodeJson;
  openGoals: number[];
}

export interface MethodInfo {
  class: string;
  name: string;
  line: number;
  hasContract: boolean;
}

/** Client view state: everything renders from API data, nothing is proof logic. */
export interface ViewModel {
  sessionId: string | null;
  source: string;
  methods: MethodInfo[];
  tree: TreeJson | null;
  selectedGoal: number | null;
  view: GoalViewJson | null;
  viewError: string | null;
  hover: HoverTarget | null;
  pendingJob: string | null;
  recording: boolean;
}

export type HoverTarget =
  | { kind: 'annotation'; index: number }
  | { kind: 'sequent'; formulaId: string }
  | { kind: 'span'; line: number; startCol: number; endCol: number };

export function emptyModel(): ViewModel {
  return {
    sessionId: null,
    source: '',
    methods: [],
    tree: null,
    selectedGoal: null,
    view: null,
    viewError: null,
    hover: null,
    pendingJob: null,
    recording: false,
  };
}

/** The fallback sequent ids are positional: A1..An then S1..Sm. */
export function formulaId(ref: SequentRef): string {
  return (ref.side === 'ante' ? 'A' : 'S') + (ref.index + 1);
}
