"""Goal views: the source-level presentation of one open proof goal."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..calculus import NodeInfo
from ..frontend.ast import Span
from ..logic import (
    OriginKind, Sequent, Term, origin_of, term_to_str, top_conjuncts, TRUE,
)
from ..pogen import ProofObligation
from .heapmap import HeapMap, NotRenderable, build_heap_map
from .positioning import assert_gap, assume_gap, gap_placement
from .retranslate import RenderCtx, retranslate


def classify_formula(formula: Term, side: str) -> str:
    """'Implicit', 'Assume' or 'Assert' by origin kinds and sequent side."""
    kinds = {o.kind for o in origin_of(formula)}
    if kinds and kinds <= {OriginKind.IMPLICIT}:
        return "Implicit"
    return "Assume" if side == "ante" else "Assert"


@dataclass
class InlineAnnotation:
    kind: str  # 'Assume' | 'Assert'
    text: str
    anchor_line: int
    placement: str  # 'before' | 'after'
    origin_spans: list[Span]
    sequent_ref: dict  # {'side', 'index', 'conjunct'}
    status: str  # 'Verbatim' | 'Retranslated' | 'Untranslatable'
    message: str = ""
    state_refs: list[tuple[str, int]] = field(default_factory=list)
    origin_kinds: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "text": self.text,
            "anchorLine": self.anchor_line,
            "placement": self.placement,
            "originSpans": [_span_json(s) for s in self.origin_spans],
            "sequentRef": self.sequent_ref,
            "status": self.status,
            "message": self.message,
            "stateRefs": [
                {"subterm": sub, "line": line} for sub, line in self.state_refs
            ],
            "originKinds": self.origin_kinds,
        }


@dataclass
class GoalView:
    goal_id: int
    executed_lines: list[tuple[int, int]]  # (line, recencyRank)
    active_line: Optional[int]
    active_executed: bool
    annotations: list[InlineAnnotation]
    branch_label_path: list[str]
    sequent_fallback: str

    def to_json(self) -> dict:
        return {
            "goalId": self.goal_id,
            "executedLines": [
                {"line": line, "recencyRank": rank}
                for line, rank in self.executed_lines
            ],
            "activeLine": self.active_line,
            "activeExecuted": self.active_executed,
            "annotations": [a.to_json() for a in self.annotations],
            "branchLabelPath": self.branch_label_path,
            "sequentFallback": self.sequent_fallback,
        }


def _span_json(s: Span) -> dict:
    return {
        "file": s.file,
        "startLine": s.start_line,
        "startCol": s.start_col,
        "endLine": s.end_line,
        "endCol": s.end_col,
    }


def render_sequent(sequent: Sequent) -> str:
    """Canonical fallback text with stable per-formula ids."""
    lines = []
    for i, f in enumerate(sequent.antecedent):
        lines.append(f"A{i + 1}: {term_to_str(f)}")
    lines.append("==>")
    for i, f in enumerate(sequent.succedent):
        lines.append(f"S{i + 1}: {term_to_str(f)}")
    return "\n".join(lines)


def position_annotations(
    sequent: Sequent, info: NodeInfo, heapmap: HeapMap, po: ProofObligation
) -> list[InlineAnnotation]:
    """Classified, translated, and positioned annotations for a goal."""
    ctx = RenderCtx(po, info, heapmap)
    items: list[tuple] = []  # (gap, kind_order, seq, conjunct_idx, annotation)
    for side in ("ante", "succ"):
        for index, formula in enumerate(sequent.side(side)):
            kind = classify_formula(formula, side)
            if kind == "Implicit":
                continue
            meta = info.meta_for(formula)
            for cidx, conj in enumerate(top_conjuncts(formula)):
                ckinds = {o.kind for o in origin_of(conj)}
                if ckinds and ckinds <= {OriginKind.IMPLICIT}:
                    continue
                if conj == TRUE:
                    continue
                if kind == "Assume":
                    gap = assume_gap(conj, meta.intro_gap, info)
                else:
                    gap = assert_gap(conj, meta.intro_gap, info)
                placement, line = gap_placement(gap, info)
                text, status, message, refs = retranslate(conj, ctx, gap)
                spans = sorted(
                    {o.span for o in origin_of(conj) if o.span is not None},
                    key=lambda s: (s.start_line, s.start_col),
                )
                ann = InlineAnnotation(
                    kind=kind,
                    text=text,
                    anchor_line=line,
                    placement=placement,
                    origin_spans=list(spans),
                    sequent_ref={"side": side, "index": index, "conjunct": cidx},
                    status=status,
                    message=message,
                    state_refs=refs,
                    origin_kinds=sorted({o.kind.value for o in origin_of(conj)}),
                )
                items.append((gap, 0 if kind == "Assume" else 1, meta.seq, cidx, ann))
    items.sort(key=lambda it: it[:4])
    return [it[4] for it in items]


def executed_lines(info: NodeInfo) -> list[tuple[int, int]]:
    lines: list[int] = []
    for step in info.path:
        if step.line in lines:
            lines.remove(step.line)
        lines.append(step.line)
    return [(line, rank) for rank, line in enumerate(lines)]


def goal_view(
    goal_id: int,
    sequent: Sequent,
    info: NodeInfo,
    po: ProofObligation,
    branch_label_path: list[str],
    closed: bool = False,
) -> GoalView:
    if closed:
        raise NotRenderable("goal closed, nothing to render")
    heapmap = build_heap_map(sequent, info)  # raises when SE is incomplete
    annotations = position_annotations(sequent, info, heapmap, po)
    lines = executed_lines(info)
    if info.pending_span is not None:
        active_line: Optional[int] = info.pending_span.start_line
        active_executed = False
    elif info.path:
        active_line = info.path[-1].line
        active_executed = True
    else:
        active_line = None
        active_executed = False
    return GoalView(
        goal_id=goal_id,
        executed_lines=lines,
        active_line=active_line,
        active_executed=active_executed,
        annotations=annotations,
        branch_label_path=branch_label_path,
        sequent_fallback=render_sequent(sequent),
    )
