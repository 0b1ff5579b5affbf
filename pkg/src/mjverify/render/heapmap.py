"""Heap map: source lines for every heap term occurring in a goal.

Heap terms only ever come into existence through symbolic execution, which
records the line of the creating statement; the map here is read off that
provenance, never guessed from syntax.  Store terms map to their
assignment's line, anonymization terms to their loop's or call's line, the
base heap to the method entry line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..calculus import NodeInfo
from ..logic import Operator, Sequent, Term


class NotRenderable(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass
class HeapMap:
    heap_lines: dict[Term, int] = field(default_factory=dict)
    var_copies: dict[Operator, tuple[Operator, int]] = field(default_factory=dict)

    def line_of(self, heap: Term) -> int:
        return self.heap_lines[heap]


def sequent_heap_terms(sequent: Sequent) -> list[Term]:
    seen: list[Term] = []
    for f in sequent.antecedent + sequent.succedent:
        for t in f.subterms():
            if t.sort.kind == "heap" and t not in seen:
                seen.append(t)
    return seen


def require_renderable(sequent: Sequent):
    from ..logic import OpKind

    for f in sequent.antecedent + sequent.succedent:
        for t in f.subterms():
            if t.op.kind in (OpKind.MODALITY, OpKind.UPDATE):
                raise NotRenderable(
                    "symbolic execution of this goal is not complete: the "
                    "sequent still contains program modalities or updates"
                )


def build_heap_map(sequent: Sequent, info: NodeInfo) -> HeapMap:
    """Heap-term lines for a goal whose symbolic execution has completed."""
    require_renderable(sequent)
    lines: dict[Term, int] = {}
    for heap in sequent_heap_terms(sequent):
        if heap in info.heap_lines:
            lines[heap] = info.heap_lines[heap]
        elif heap.op.kind.value == "skolem-constant":
            # anonymization heaps themselves carry no own line; the anon term
            # wrapping them does
            continue
        else:
            raise NotRenderable(
                f"no source line recorded for heap term {heap!r}"
            )
    return HeapMap(lines, dict(info.var_copies))
