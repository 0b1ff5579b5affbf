"""Rule lookup and application: the calculus' public entry points."""

from __future__ import annotations

from typing import Iterator

from ..logic import Sequent, Term
from .base import (
    CalculusError, ChildGoal, Focus, FreshNames, GoalState, RuleApplication,
    resolve_focus,
)
from .rules import REGISTRY, Rule, get_rule


def enumerate_foci(sequent: Sequent) -> Iterator[Focus]:
    """All positions in a sequent, deterministic preorder."""
    for side in ("ante", "succ"):
        for i, f in enumerate(sequent.side(side)):
            yield from _foci(f, side, i, ())


def _foci(t: Term, side: str, index: int, path: tuple) -> Iterator[Focus]:
    yield Focus(side, index, path)
    for k, c in enumerate(t.children):
        yield from _foci(c, side, index, path + (k,))


def applicable_rules(goal: GoalState, focus: Focus) -> list[Rule]:
    """All and only the rules whose schema matches at the focus."""
    term = resolve_focus(goal.sequent, focus)
    out = []
    for rule in REGISTRY.values():
        if rule.top_level and focus.path != ():
            continue
        try:
            if rule.matcher(goal, focus, term):
                out.append(rule)
        except CalculusError:
            continue
    return out


def goal_level_focus(sequent) -> Focus:
    """A canonical focus for rules that apply to the goal as a whole."""
    if sequent.succedent:
        return Focus("succ", 0, ())
    return Focus("ante", 0, ())


def apply_rule(
    goal: GoalState, app: RuleApplication, fresh: FreshNames
) -> list[ChildGoal]:
    """Apply a rule; children per schema with origins propagated by category."""
    rule = get_rule(app.rule_id)
    if rule.goal_level:
        return rule.applier(goal, app, fresh)
    term = resolve_focus(goal.sequent, app.focus)
    if rule.top_level and app.focus.path != ():
        raise CalculusError(f"{rule.id} applies to whole formulas only")
    if not rule.matcher(goal, app.focus, term):
        raise CalculusError(f"rule {rule.id} does not match at {app.focus}")
    return rule.applier(goal, app, fresh)
