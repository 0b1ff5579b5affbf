"""Automated proof search: macros over a fixed rule priority table.

Each macro restricts which rules automation may apply.  Search is strictly
deterministic: goals are visited in node-id order and for each goal the
highest-priority rule with the first matching focus fires.  The quantifier
instantiation heuristic (full auto only) instantiates with ground atoms
already present in the sequent, under a budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from ..calculus import (
    CalculusError, Focus, GoalState, RuleApplication, enumerate_foci, get_rule,
    resolve_focus,
)
from ..calculus.rules import REGISTRY, Rule, RuleCategory, register
from ..logic import OpKind, Sequent, Term, term_key
from .linarith import decide_linear_int


class MacroKind(Enum):
    SYMBOLIC_EXECUTION_ONLY = "SymbolicExecutionOnly"
    PROPOSITIONAL_ONLY = "PropositionalOnly"
    UPDATE_SIMPLIFICATION = "UpdateSimplification"
    FULL_AUTO = "FullAuto"


@dataclass
class StrategySettings:
    max_rule_apps: int = 10000
    macro: MacroKind = MacroKind.FULL_AUTO
    quant_inst_budget: int = 40

    def __post_init__(self):
        if self.max_rule_apps <= 0:
            raise ValueError("max_rule_apps must be positive")


@dataclass
class MacroResult:
    closed_goals: list[int]
    open_goals: list[int]
    rule_apps_used: int
    budget_exhausted: bool = False
    cancelled: bool = False


_FM_CACHE: dict[Sequent, str] = {}


def _arith_valid(sequent: Sequent) -> bool:
    if sequent not in _FM_CACHE:
        if len(_FM_CACHE) > 4096:
            _FM_CACHE.clear()
        _FM_CACHE[sequent] = decide_linear_int(sequent)
    return _FM_CACHE[sequent] == "Valid"


def _register_arith_close():
    def matcher(goal: GoalState, focus: Focus, term: Term) -> bool:
        return focus.side == "succ" and focus.index == 0 and focus.path == () and _arith_valid(goal.sequent)

    def applier(goal, app, fresh):
        if not _arith_valid(goal.sequent):
            raise CalculusError("arithClose: sequent not decided valid")
        return []

    register(Rule("arithClose", RuleCategory.CLOSING, matcher, applier, top_level=True))


_register_arith_close()


# The fixed priority table; golden-tested, part of the determinism contract.
PRIORITY: tuple[str, ...] = (
    "closeFalse", "closeTrue", "close",
    "trueLeft", "falseRight",
    "expandEntry", "seBlock", "seLocalDecl", "seAssign", "seReturn",
    "assumeStmt", "assertStmt", "ifElseSplit", "methodContract",
    "loopInvariant", "emptyModality",
    "andLeft", "impRight", "notLeft", "notRight", "orRight",
    "eqClose", "selectOfStoreSame", "selectOfStoreDistinct", "selectOfAnonIn",
    "selectOfAnonOut", "arrIdxArr", "isArrIdxEval", "fieldEq", "inSetExpand",
    "selectOfAnonOutCond",
    "arithClose",
    "selectOfStoreSplit", "selectOfAnonSplit", "splitIf",
    "orLeft", "impLeft", "andRight",
    "allRight", "exLeft",
)

_SE_RULES = {
    "expandEntry", "seBlock", "seLocalDecl", "seAssign", "seReturn",
    "assumeStmt", "assertStmt", "ifElseSplit", "methodContract",
    "loopInvariant", "emptyModality",
}
_PROP_RULES = {
    "close", "closeTrue", "closeFalse", "trueLeft", "falseRight",
    "andLeft", "orRight", "impRight", "notLeft", "notRight",
    "orLeft", "impLeft", "andRight",
}

MACRO_RULES: dict[MacroKind, tuple[str, ...]] = {
    MacroKind.SYMBOLIC_EXECUTION_ONLY: tuple(r for r in PRIORITY if r in _SE_RULES),
    MacroKind.PROPOSITIONAL_ONLY: tuple(r for r in PRIORITY if r in _PROP_RULES),
    MacroKind.UPDATE_SIMPLIFICATION: ("emptyModality",),
    MacroKind.FULL_AUTO: PRIORITY,
}


def _find_action(goal: GoalState, rule_ids: tuple[str, ...]) -> Optional[RuleApplication]:
    foci = list(enumerate_foci(goal.sequent))
    for rule_id in rule_ids:
        rule = REGISTRY[rule_id]
        for focus in foci:
            if rule.top_level and focus.path != ():
                continue
            # arithClose is only probed once per goal, at the fixed focus
            try:
                term = resolve_focus(goal.sequent, focus)
                if rule.matcher(goal, focus, term):
                    return RuleApplication(rule_id, focus)
            except CalculusError:
                continue
    return None


def _inst_candidates(sequent: Sequent) -> list[Term]:
    """Ground atoms worth trying for quantifier instantiation."""
    out: dict[str, Term] = {}
    for f in sequent.antecedent + sequent.succedent:
        for t in f.subterms():
            if t.sort.kind != "int" or t.children:
                continue
            if t.op.kind in (OpKind.SKOLEM, OpKind.PROGRAM_VAR):
                out.setdefault(term_key(t), t)
            elif t.op.kind is OpKind.CONSTANT and isinstance(t.op.payload, int):
                if abs(t.op.payload) <= 1:
                    out.setdefault(term_key(t), t)
    return [out[k] for k in sorted(out)]


def _find_instantiation(goal: GoalState) -> Optional[RuleApplication]:
    cands = _inst_candidates(goal.sequent)
    if not cands:
        return None
    for side, rule_id, qname in (("ante", "allLeft", "forall"), ("succ", "exRight", "exists")):
        for i, f in enumerate(goal.sequent.side(side)):
            if f.op.kind is not OpKind.QUANTIFIER or f.op.name != qname:
                continue
            if f.op.payload.payload.kind != "int":
                continue
            for t in cands:
                if (f, t) in goal.info.insts_done:
                    continue
                return RuleApplication(
                    rule_id, Focus(side, i, ()), (("term", t),)
                )
    return None


def run_macro(
    tree,
    goal_id: Optional[int],
    settings: StrategySettings,
    should_stop: Callable[[], bool] = lambda: False,
) -> MacroResult:
    """Apply rules by priority until closure, quiescence, or budget."""
    from ..session.tree import ProofTree  # typing only

    scope_root = tree.node(goal_id) if goal_id is not None else tree.root

    def in_scope(node) -> bool:
        n = node
        while n is not None:
            if n is scope_root:
                return True
            n = n.parent
        return False

    initial = {n.id for n in tree.open_goals() if in_scope(n)}
    apps = 0
    insts = 0
    stuck: set[int] = set()
    cancelled = False
    budget_exhausted = False
    while True:
        if should_stop():
            cancelled = True
            break
        if apps >= settings.max_rule_apps:
            budget_exhausted = True
            break
        goals = [n for n in tree.open_goals() if in_scope(n) and n.id not in stuck]
        goals.sort(key=lambda n: n.id)
        if not goals:
            break
        progressed = False
        for node in goals:
            goal = tree.goal_state(node)
            action = _find_action(goal, MACRO_RULES[settings.macro])
            if action is None and settings.macro is MacroKind.FULL_AUTO:
                if insts < settings.quant_inst_budget:
                    action = _find_instantiation(goal)
                    if action is not None:
                        insts += 1
            if action is None:
                stuck.add(node.id)
                continue
            descriptor = _describe(action)
            tree.apply(node.id, action, descriptor)
            apps += 1
            progressed = True
            break
        if not progressed:
            break

    if settings.macro is MacroKind.FULL_AUTO and not cancelled:
        _retreat(tree, scope_root)

    final_open = {n.id for n in tree.open_goals() if in_scope(n)}
    closed = sorted(initial - final_open)
    return MacroResult(
        closed_goals=closed,
        open_goals=sorted(final_open),
        rule_apps_used=apps,
        budget_exhausted=budget_exhausted,
        cancelled=cancelled,
    )


# Branching first-order decompositions and quantifier steps.  When such a
# step fails to close its whole subtree, the fragments document nothing the
# parent goal does not; pruning back presents the obligation in its most
# readable state.  Non-branching context simplification (andLeft etc.) and
# all symbolic execution stay untouched.
_RETREAT_RULES = {
    "andLeft", "andRight", "orLeft", "orRight", "impLeft", "impRight",
    "notLeft", "notRight", "splitIf",
    "selectOfStoreSplit", "selectOfAnonSplit",
    "allRight", "exLeft", "allLeft", "exRight",
}

_SE_RULE_IDS = _SE_RULES


def _subtree_has_se(node) -> bool:
    if node.applied is not None and node.applied.rule_id in _SE_RULE_IDS:
        return True
    return any(_subtree_has_se(c) for c in node.children)


def _retreat(tree, scope_root):
    def walk(node):
        if (
            node.applied is not None
            and node.applied.rule_id in _RETREAT_RULES
            and not node.is_closed()
            and not _subtree_has_se(node)
        ):
            tree.prune(node.id)
            return
        for child in list(node.children):
            walk(child)

    walk(scope_root)


def _describe(app: RuleApplication) -> dict:
    """Serializable form of an automatic rule application."""
    inst = {}
    for key, value in app.instantiations:
        if isinstance(value, Term):
            inst[key] = {"kind": "key", "key": term_key(value)}
        else:
            inst[key] = {"kind": "name", "name": str(value)}
    return {
        "rule": app.rule_id,
        "focus": {"side": app.focus.side, "index": app.focus.index,
                  "path": list(app.focus.path)},
        "inst": inst,
    }
