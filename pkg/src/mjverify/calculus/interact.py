"""User-input rules: case distinction, term pull-out, hiding formulas."""

from __future__ import annotations

from ..logic import EQ, OpKind, Term, mk_term, skolem
from .base import CalculusError, ChildGoal, FreshNames, GoalState, RuleApplication, resolve_focus
from .rules import REGISTRY, Rule, RuleCategory, register, transfer_meta


def _mk_cut():
    def matcher(goal, focus, term):
        return focus.path == ()

    def applier(goal: GoalState, app: RuleApplication, fresh: FreshNames):
        formula = app.inst("formula")
        if not isinstance(formula, Term):
            raise CalculusError("cut requires a 'formula' instantiation")
        if formula.sort.kind != "bool":
            raise CalculusError("cut formula must be boolean")
        if any(t.op.kind is OpKind.BOUND_VAR for t in formula.subterms() if not t.children):
            pass  # closed quantified formulas are fine; dangling vars are not
        seq1 = goal.sequent.with_added("ante", formula)
        info1 = goal.info.record_formulas([formula])
        seq2 = goal.sequent.with_added("succ", formula)
        info2 = goal.info.record_formulas([formula])
        return [
            ChildGoal(seq1, info1, "Cut True"),
            ChildGoal(seq2, info2, "Cut False"),
        ]

    register(
        Rule("cut", RuleCategory.USER_INPUT, matcher, applier,
             ("Cut True", "Cut False"), user_only=True, top_level=True,
             goal_level=True)
    )


def _mk_pull_out():
    def matcher(goal, focus, term):
        if term.op.kind in (OpKind.CONSTANT, OpKind.BOUND_VAR, OpKind.PROGRAM_VAR,
                            OpKind.UPDATE, OpKind.MODALITY, OpKind.QUANTIFIER):
            return False
        if term.sort.kind == "bool":
            return False
        if any(s.op.kind is OpKind.BOUND_VAR for s in term.subterms()):
            return False  # would escape its binder
        return True

    def applier(goal: GoalState, app: RuleApplication, fresh: FreshNames):
        term = resolve_focus(goal.sequent, app.focus)
        if not matcher(goal, app.focus, term):
            raise CalculusError("pullOut: focus must be a compound, binder-free term")
        name = app.inst("as") or fresh.fresh("c")
        const = skolem(str(name), term.sort)
        defining = mk_term(EQ, (const, term))
        ante = [f.replace(term, const) for f in goal.sequent.antecedent]
        succ = [f.replace(term, const) for f in goal.sequent.succedent]
        from ..logic import Sequent

        seq = Sequent(ante + [defining], succ)
        info = goal.info
        for old, new in zip(goal.sequent.antecedent, ante):
            info = transfer_meta(info, old, [new])
        for old, new in zip(goal.sequent.succedent, succ):
            info = transfer_meta(info, old, [new])
        info = info.record_formulas([defining])
        info = info.evolve(pullout_defs={**info.pullout_defs, const.op: term})
        return [ChildGoal(seq, info)]

    register(
        Rule("pullOut", RuleCategory.USER_INPUT, matcher, applier,
             user_only=True)
    )


def _mk_hide():
    def mk(rule_id: str, side: str):
        def matcher(goal, focus, term):
            return focus.side == side and focus.path == ()

        def applier(goal: GoalState, app: RuleApplication, fresh: FreshNames):
            seq = goal.sequent.with_removed(side, app.focus.index)
            return [ChildGoal(seq, goal.info)]

        register(
            Rule(rule_id, RuleCategory.USER_INPUT, matcher, applier,
                 user_only=True, top_level=True)
        )

    mk("hideLeft", "ante")
    mk("hideRight", "succ")


def _mk_expand_class_inv():
    from ..logic import OriginKind, mk_and
    from ..translate import TEnv, origin_maker, translate
    from .rules import make_rewrite

    def result(goal: GoalState, t: Term):
        po = goal.po
        if po is None:
            return None
        class_name = t.op.payload
        cls = po.unit.find_class(class_name)
        if cls is None or not cls.invariants:
            return None
        heap_term, obj = t.children
        env = TEnv(
            unit=po.unit, cls=cls, method=None, values={}, var_types={},
            heap_term=heap_term, self_term=obj,
            origin=origin_maker(OriginKind.ASSUME, po.unit.path),
        )
        return mk_and([translate(inv.expr, env) for inv in cls.invariants])

    make_rewrite(
        "expandClassInv", RuleCategory.PURE_REWRITE,
        lambda t: t.op.kind is OpKind.HEAP_FN and t.op.name.startswith("inv_"),
        result,
        user_only=True,
    )


_mk_cut()
_mk_pull_out()
_mk_hide()
_mk_expand_class_inv()
