"""Positioning of inline annotations along the executed path.

Assumptions start at their introduction point and shift downwards until a
statement with a heap change that is not part of the formula (or a variable
write the formula's rendering depends on) is reached, or the active
statement.  Assertions start at the end of the executed path and shift
upwards until they reach a heap update contained in the formula or a
relevant variable write; formulas referring to several states therefore sit
as late as possible and render earlier states with `\\old` forms.
"""

from __future__ import annotations

from typing import Optional

from ..calculus import NodeInfo, PathStep
from ..logic import OpKind, Term


def _heap_terms(formula: Term) -> list[Term]:
    return [t for t in formula.subterms() if t.sort.kind == "heap"]


def _eligible(value: Term, var_op) -> bool:
    if value.op == var_op:
        return False
    if value.op.kind is OpKind.CONSTANT:
        return False
    return True


def _var_relevant(step: PathStep, formula: Term) -> bool:
    for var_op, before, after in step.var_events:
        if before == after:
            continue
        if _eligible(before, var_op) and formula.contains(before):
            return True
        if _eligible(after, var_op) and formula.contains(after):
            return True
    return False


def blocks_down(step: PathStep, formula: Term, has_heap: bool) -> bool:
    """May an assumption not move below this statement?"""
    if step.heap_created is not None:
        if has_heap:
            if not formula.contains(step.heap_created):
                return True
        elif not step.is_anon:
            return True  # heap-free assumptions stop at real writes
    return _var_relevant(step, formula)


def blocks_up(step: PathStep, formula: Term, has_heap: bool) -> bool:
    """May an assertion not move above this statement?"""
    if step.heap_created is not None and has_heap:
        if formula.contains(step.heap_created):
            return True  # cannot float above the birth of its own state
    return _var_relevant(step, formula)


def assume_gap(formula: Term, intro: int, info: NodeInfo) -> int:
    steps = info.path
    has_heap = bool(_heap_terms(formula))
    cap = len(steps) if info.pending_span is not None else max(len(steps) - 1, 0)
    cap = max(cap, min(intro, len(steps)))
    g = min(intro, len(steps))
    while g < cap:
        if blocks_down(steps[g], formula, has_heap):
            break
        g += 1
    return g


def assert_gap(formula: Term, intro: int, info: NodeInfo) -> int:
    steps = info.path
    has_heap = bool(_heap_terms(formula))
    floor = min(intro, len(steps))
    g = len(steps)
    while g > floor:
        if blocks_up(steps[g - 1], formula, has_heap):
            break
        g -= 1
    return g


def gap_placement(gap: int, info: NodeInfo) -> tuple[str, int]:
    """(\"before\"|\"after\", line) for an anchor gap."""
    steps = info.path
    if gap < len(steps):
        return "before", steps[gap].line
    if info.pending_span is not None:
        return "before", info.pending_span.start_line
    if steps:
        return "after", steps[-1].line
    return "before", info.entry_line
