"""Sequent-calculus rules: propositional, equality, heap theory, quantifiers.

Every rule belongs to a category that determines how origin labels move from
the matched term to the result: pure rewrites transfer the matched operator's
origins, conditional rewrites add the origins of the formulas that justified
them, results that are subterms of the match keep their own labels, and
freshly built operators get none.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

from ..logic import (
    ADD, ALL_LOCS, AND, ARR, ARRAY_RANGE, EQ, FALSE, GT, IMP, IN_SET, ITE,
    MUL, NOT, OR, SINGLETON, TRUE, UNION, EMPTY_LOCS,
    OpKind, Operator, Sequent, Term, int_lit, mk_and, mk_compare, mk_term,
    negate_formula, origin_of, poly_of, simplify, skolem,
)
from .base import (
    CalculusError, ChildGoal, Focus, FreshNames, GoalState, NodeInfo,
    RuleApplication, replace_at, resolve_focus, under_binder,
)


class RuleCategory(Enum):
    PURE_REWRITE = "PureRewrite"
    CONDITIONAL_REWRITE = "ConditionalRewrite"
    SEQUENT_STRUCTURAL = "SequentStructural"
    SYMBOLIC_EXECUTION = "SymbolicExecution"
    CLOSING = "Closing"
    USER_INPUT = "UserInput"


@dataclass
class Rule:
    id: str
    category: RuleCategory
    matcher: Callable[[GoalState, Focus, Term], bool]
    applier: Callable[[GoalState, RuleApplication, FreshNames], list[ChildGoal]]
    branch_labels: tuple[str, ...] = ()
    user_only: bool = False
    top_level: bool = False  # matches only whole formulas
    goal_level: bool = False  # applies to the goal, focus is irrelevant


REGISTRY: dict[str, Rule] = {}


def register(rule: Rule) -> Rule:
    assert rule.id not in REGISTRY, f"duplicate rule id {rule.id}"
    REGISTRY[rule.id] = rule
    return rule


def get_rule(rule_id: str) -> Rule:
    if rule_id not in REGISTRY:
        raise CalculusError(f"unknown rule {rule_id!r}")
    return REGISTRY[rule_id]


def propagate_origins(
    category: RuleCategory, matched: Term, conditions: Sequence[Term], result: Term
) -> Term:
    """Origin transfer per rule category.

    A result that is a subterm of the match keeps its own labels (this is
    what prevents origin accumulation); otherwise the root receives the
    matched operator's origins, plus the condition formulas' origins for
    conditional rewrites.  Freshly created inner operators carry nothing.
    """
    if category is RuleCategory.PURE_REWRITE:
        if matched.contains(result):
            return result
        return result.with_origins(matched.origins)
    if category is RuleCategory.CONDITIONAL_REWRITE:
        combined = frozenset(matched.origins)
        for a in conditions:
            combined |= origin_of(a)
        return result.with_origins(combined)
    return result


def transfer_meta(info: NodeInfo, old: Term, new_terms: Sequence[Term]) -> NodeInfo:
    meta = dict(info.formula_meta)
    if old in meta:
        for t in new_terms:
            if t not in meta:
                meta[t] = meta[old]
    return info.evolve(formula_meta=meta)


def _rewrite_child(goal: GoalState, focus: Focus, result: Term) -> ChildGoal:
    old_formula = goal.sequent.side(focus.side)[focus.index]
    seq = replace_at(goal.sequent, focus, result)
    new_formula = None
    side = seq.side(focus.side)
    if focus.index < len(side):
        new_formula = side[focus.index]
    info = goal.info
    if new_formula is not None:
        info = transfer_meta(info, old_formula, [new_formula])
    return ChildGoal(seq, info)


def make_rewrite(
    rule_id: str,
    category: RuleCategory,
    match: Callable[[Term], bool],
    result: Callable[[GoalState, Term], Optional[Term]],
    conditions: Callable[[GoalState, Term], list[Term]] = lambda g, t: [],
    user_only: bool = False,
) -> Rule:
    """A term rewrite s ~> t applied at any focus position."""

    def matcher(goal: GoalState, focus: Focus, term: Term) -> bool:
        return match(term) and result(goal, term) is not None

    def applier(goal: GoalState, app: RuleApplication, fresh: FreshNames):
        t = resolve_focus(goal.sequent, app.focus)
        if not match(t):
            raise CalculusError(f"{rule_id}: focus does not match")
        res = result(goal, t)
        if res is None:
            raise CalculusError(f"{rule_id}: not applicable here")
        conds = conditions(goal, t)
        res = propagate_origins(category, t, conds, res)
        return [_rewrite_child(goal, app.focus, res)]

    return register(Rule(rule_id, category, matcher, applier, user_only=user_only))


def make_structural(
    rule_id: str,
    matcher: Callable[[GoalState, Focus, Term], bool],
    applier,
    branch_labels: tuple[str, ...] = (),
    category: RuleCategory = RuleCategory.SEQUENT_STRUCTURAL,
    user_only: bool = False,
) -> Rule:
    return register(
        Rule(rule_id, category, matcher, applier, branch_labels, user_only, top_level=True)
    )


# ---------------------------------------------------------------------------
# propositional rules
# ---------------------------------------------------------------------------


def _top(focus: Focus) -> bool:
    return focus.path == ()


def _split_formula(goal, focus, parts_per_child, labels, extra_ante=None):
    """Replace the focused formula by parts, branching into several children."""
    old = goal.sequent.side(focus.side)[focus.index]
    out = []
    for i, parts in enumerate(parts_per_child):
        seq = goal.sequent.with_replaced(focus.side, focus.index, *parts)
        if extra_ante and extra_ante[i]:
            seq = seq.with_added("ante", *extra_ante[i])
        info = transfer_meta(goal.info, old, parts)
        if extra_ante and extra_ante[i]:
            info = info.record_formulas(extra_ante[i])
        out.append(ChildGoal(seq, info, labels[i] if labels else ""))
    return out


def _mk_and_left():
    def matcher(goal, focus, t):
        return focus.side == "ante" and _top(focus) and t.op == AND

    def applier(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        return _split_formula(goal, app.focus, [list(t.children)], None)

    make_structural("andLeft", matcher, applier)


def _mk_or_right():
    def matcher(goal, focus, t):
        return focus.side == "succ" and _top(focus) and t.op == OR

    def applier(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        return _split_formula(goal, app.focus, [list(t.children)], None)

    make_structural("orRight", matcher, applier)


def _mk_imp_right():
    def matcher(goal, focus, t):
        return focus.side == "succ" and _top(focus) and t.op == IMP

    def applier(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        seq = goal.sequent.with_replaced("succ", app.focus.index, t.children[1])
        seq = seq.with_added("ante", t.children[0])
        info = transfer_meta(goal.info, t, [t.children[1]])
        info = info.record_formulas([t.children[0]])
        return [ChildGoal(seq, info)]

    make_structural("impRight", matcher, applier)


def _mk_not_left():
    def matcher(goal, focus, t):
        return focus.side == "ante" and _top(focus) and t.op == NOT

    def applier(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        seq = goal.sequent.with_removed("ante", app.focus.index)
        seq = seq.with_added("succ", t.children[0])
        info = transfer_meta(goal.info, t, [t.children[0]])
        info = info.record_formulas([t.children[0]])
        return [ChildGoal(seq, info)]

    make_structural("notLeft", matcher, applier)


def _mk_not_right():
    def matcher(goal, focus, t):
        return focus.side == "succ" and _top(focus) and t.op == NOT

    def applier(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        seq = goal.sequent.with_removed("succ", app.focus.index)
        seq = seq.with_added("ante", t.children[0])
        info = transfer_meta(goal.info, t, [t.children[0]])
        info = info.record_formulas([t.children[0]])
        return [ChildGoal(seq, info)]

    make_structural("notRight", matcher, applier)


def _mk_or_left():
    def matcher(goal, focus, t):
        return focus.side == "ante" and _top(focus) and t.op == OR

    def applier(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        return _split_formula(
            goal, app.focus,
            [[t.children[0]], [t.children[1]]],
            ("Left Disjunct", "Right Disjunct"),
        )

    make_structural("orLeft", matcher, applier, ("Left Disjunct", "Right Disjunct"))


def _mk_and_right():
    def matcher(goal, focus, t):
        return focus.side == "succ" and _top(focus) and t.op == AND

    def applier(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        return _split_formula(
            goal, app.focus,
            [[t.children[0]], [t.children[1]]],
            ("Conjunct 1", "Conjunct 2"),
        )

    make_structural("andRight", matcher, applier, ("Conjunct 1", "Conjunct 2"))


def _mk_imp_left():
    def matcher(goal, focus, t):
        return focus.side == "ante" and _top(focus) and t.op == IMP

    def applier(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        prem, conc = t.children
        seq1 = goal.sequent.with_removed("ante", app.focus.index).with_added("succ", prem)
        info1 = transfer_meta(goal.info, t, [prem]).record_formulas([prem])
        seq2 = goal.sequent.with_replaced("ante", app.focus.index, conc)
        info2 = transfer_meta(goal.info, t, [conc])
        return [
            ChildGoal(seq1, info1, "Premiss"),
            ChildGoal(seq2, info2, "Conclusion"),
        ]

    make_structural("impLeft", matcher, applier, ("Premiss", "Conclusion"))


def _mk_deletions():
    def t_matcher(goal, focus, t):
        return focus.side == "ante" and _top(focus) and t == TRUE

    def t_applier(goal, app, fresh):
        return [ChildGoal(goal.sequent.with_removed("ante", app.focus.index), goal.info)]

    make_structural("trueLeft", t_matcher, t_applier)

    def f_matcher(goal, focus, t):
        return focus.side == "succ" and _top(focus) and t == FALSE

    def f_applier(goal, app, fresh):
        return [ChildGoal(goal.sequent.with_removed("succ", app.focus.index), goal.info)]

    make_structural("falseRight", f_matcher, f_applier)


def _mk_closing():
    def close_matcher(goal, focus, t):
        return _top(focus) and focus.side == "ante" and t in goal.sequent.succedent

    def close_applier(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        if t not in goal.sequent.succedent:
            raise CalculusError("close: formula not on both sides")
        return []

    make_structural("close", close_matcher, close_applier, category=RuleCategory.CLOSING)

    def ct_matcher(goal, focus, t):
        return _top(focus) and focus.side == "succ" and t == TRUE

    def ct_applier(goal, app, fresh):
        if resolve_focus(goal.sequent, app.focus) != TRUE:
            raise CalculusError("closeTrue: focus is not true")
        return []

    make_structural("closeTrue", ct_matcher, ct_applier, category=RuleCategory.CLOSING)

    def cf_matcher(goal, focus, t):
        return _top(focus) and focus.side == "ante" and t == FALSE

    def cf_applier(goal, app, fresh):
        if resolve_focus(goal.sequent, app.focus) != FALSE:
            raise CalculusError("closeFalse: focus is not false")
        return []

    make_structural("closeFalse", cf_matcher, cf_applier, category=RuleCategory.CLOSING)


# ---------------------------------------------------------------------------
# equality and pure rewriting
# ---------------------------------------------------------------------------


def _mk_eq_rules():
    make_rewrite(
        "eqClose", RuleCategory.PURE_REWRITE,
        lambda t: t.op == EQ and t.children[0] == t.children[1],
        lambda g, t: TRUE,
    )

    make_rewrite(
        "eqSymm", RuleCategory.PURE_REWRITE,
        lambda t: t.op == EQ,
        lambda g, t: Term(EQ, (t.children[1], t.children[0]), t.sort),
        user_only=True,
    )

    def apply_eq_result(goal: GoalState, t: Term) -> Optional[Term]:
        for a in goal.sequent.antecedent:
            if a.op == EQ and a.children[0] == t and a.children[1] != t:
                return a.children[1]
        return None

    def apply_eq_conditions(goal: GoalState, t: Term) -> list[Term]:
        for a in goal.sequent.antecedent:
            if a.op == EQ and a.children[0] == t and a.children[1] != t:
                return [a]
        return []

    make_rewrite(
        "applyEq", RuleCategory.CONDITIONAL_REWRITE,
        lambda t: t.op.kind is not OpKind.BOUND_VAR and t.sort.kind != "bool",
        apply_eq_result,
        apply_eq_conditions,
        user_only=True,
    )


# ---------------------------------------------------------------------------
# heap theory
# ---------------------------------------------------------------------------


def _field_distinct(f1: Term, f2: Term) -> Optional[bool]:
    """True/False when (dis)equality of two field terms is decidable."""
    if f1 == f2:
        return False
    c1 = f1.op.kind is OpKind.CONSTANT
    c2 = f2.op.kind is OpKind.CONSTANT
    if c1 and c2:
        return f1.op.name != f2.op.name
    if (c1 and f2.op == ARR) or (c2 and f1.op == ARR):
        return True
    if f1.op == ARR and f2.op == ARR:
        monos, const = poly_of(
            simplify(mk_term(ADD, (f1.children[0], mk_term(MUL, (int_lit(-1), f2.children[0])))))
        )
        if not monos:
            return const != 0
        return None
    return None


def _objects_distinct(o1: Term, o2: Term) -> Optional[bool]:
    if o1 == o2:
        return False
    n1 = o1.op.name == "null"
    n2 = o2.op.name == "null"
    if n1 != n2 and (n1 or n2):
        return None  # needs the non-null fact, handled by conditional rules
    return None


def _mk_select_rules():
    def is_select_store(t: Term) -> bool:
        from ..logic import SELECT, STORE

        return t.op == SELECT and t.children[0].op == STORE

    def same_loc(t: Term) -> Optional[bool]:
        st = t.children[0]
        o_w, f_w = st.children[1], st.children[2]
        o_r, f_r = t.children[1], t.children[2]
        fd = _field_distinct(f_w, f_r)
        if o_w == o_r and fd is False:
            return True
        if fd is True:
            return False
        if _objects_distinct(o_w, o_r) is True:
            return False
        return None

    make_rewrite(
        "selectOfStoreSame", RuleCategory.PURE_REWRITE,
        is_select_store,
        lambda g, t: t.children[0].children[3] if same_loc(t) is True else None,
    )

    def distinct_result(g, t):
        from ..logic import SELECT

        if same_loc(t) is not False:
            return None
        st = t.children[0]
        return mk_term(SELECT, (st.children[0], t.children[1], t.children[2]))

    make_rewrite(
        "selectOfStoreDistinct", RuleCategory.PURE_REWRITE,
        is_select_store, distinct_result,
    )

    def split_result(g, t):
        from ..logic import SELECT

        if same_loc(t) is not None:
            return None
        st = t.children[0]
        o_w, f_w, val = st.children[1], st.children[2], st.children[3]
        o_r, f_r = t.children[1], t.children[2]
        conds = []
        if o_w != o_r:
            conds.append(mk_term(EQ, (o_r, o_w)))
        if f_w != f_r:
            if f_w.op == ARR and f_r.op == ARR:
                conds.append(mk_term(EQ, (f_r.children[0], f_w.children[0])))
            else:
                conds.append(mk_term(EQ, (f_r, f_w)))
        cond = mk_and(conds)
        alt = mk_term(SELECT, (st.children[0], o_r, f_r))
        return mk_term(ITE, (cond, val, alt))

    make_rewrite(
        "selectOfStoreSplit", RuleCategory.PURE_REWRITE,
        is_select_store, split_result,
    )

    # --- anon ---------------------------------------------------------------

    def is_select_anon(t: Term) -> bool:
        from ..logic import ANON, SELECT

        return t.op == SELECT and t.children[0].op == ANON

    def membership(locset: Term, o: Term, f: Term) -> Optional[bool]:
        """Syntactic membership of (o, f) in a location set term."""
        if locset.op == EMPTY_LOCS:
            return False
        if locset.op == SINGLETON:
            fd = _field_distinct(locset.children[1], f)
            if locset.children[0] == o and fd is False:
                return True
            if fd is True:
                return False
            return None
        if locset.op == UNION:
            a = membership(locset.children[0], o, f)
            b = membership(locset.children[1], o, f)
            if a is True or b is True:
                return True
            if a is False and b is False:
                return False
            return None
        if locset.op == ARRAY_RANGE:
            if f.op != ARR:
                if f.op.kind is OpKind.CONSTANT:
                    return False
                return None
            if locset.children[0] != o:
                return None
            idx = f.children[0]
            lo, hi = locset.children[1], locset.children[2]
            lo_ok = _const_sign(idx, lo)   # idx - lo >= 0 ?
            hi_ok = _const_sign(hi, idx)   # hi - idx >= 0 ?
            if lo_ok is True and hi_ok is True:
                return True
            if lo_ok is False or hi_ok is False:
                return False
            return None
        return None

    def anon_in(g, t):
        from ..logic import SELECT

        an = t.children[0]
        if membership(an.children[1], t.children[1], t.children[2]) is True:
            return mk_term(SELECT, (an.children[2], t.children[1], t.children[2]))
        return None

    make_rewrite("selectOfAnonIn", RuleCategory.PURE_REWRITE, is_select_anon, anon_in)

    def anon_out(g, t):
        from ..logic import SELECT

        an = t.children[0]
        if membership(an.children[1], t.children[1], t.children[2]) is False:
            return mk_term(SELECT, (an.children[0], t.children[1], t.children[2]))
        return None

    make_rewrite("selectOfAnonOut", RuleCategory.PURE_REWRITE, is_select_anon, anon_out)

    def not_in_formula(goal, t) -> list[Term]:
        an = t.children[0]
        want = mk_term(IN_SET, (t.children[1], t.children[2], an.children[1]))
        for a in goal.sequent.antecedent:
            if a.op == NOT and a.children[0] == want:
                return [a]
        return []

    def anon_out_cond(g, t):
        from ..logic import SELECT

        if not not_in_formula(g, t):
            return None
        an = t.children[0]
        return mk_term(SELECT, (an.children[0], t.children[1], t.children[2]))

    make_rewrite(
        "selectOfAnonOutCond", RuleCategory.CONDITIONAL_REWRITE,
        is_select_anon, anon_out_cond, not_in_formula,
    )

    def anon_split(g, t):
        from ..logic import SELECT

        an = t.children[0]
        if membership(an.children[1], t.children[1], t.children[2]) is not None:
            return None
        cond = mk_term(IN_SET, (t.children[1], t.children[2], an.children[1]))
        return mk_term(
            ITE,
            (
                cond,
                mk_term(SELECT, (an.children[2], t.children[1], t.children[2])),
                mk_term(SELECT, (an.children[0], t.children[1], t.children[2])),
            ),
        )

    make_rewrite("selectOfAnonSplit", RuleCategory.PURE_REWRITE, is_select_anon, anon_split)


def _const_sign(a: Term, b: Term) -> Optional[bool]:
    """a - b >= 0 when that difference is a known constant, else None."""
    from ..logic import ADD, MUL

    diff = simplify(mk_term(ADD, (a, mk_term(MUL, (int_lit(-1), b)))))
    monos, const = poly_of(diff)
    if monos:
        return None
    return const >= 0


def _mk_locset_rules():
    def in_result(g, t):
        o, f, ls = t.children
        if ls.op == EMPTY_LOCS:
            return FALSE
        if ls.op == SINGLETON:
            parts = []
            if ls.children[0] != o:
                parts.append(mk_term(EQ, (o, ls.children[0])))
            fw = ls.children[1]
            if fw != f:
                if fw.op == ARR and f.op == ARR:
                    parts.append(mk_term(EQ, (f.children[0], fw.children[0])))
                else:
                    parts.append(mk_term(EQ, (f, fw)))
            return mk_and(parts)
        if ls.op == UNION:
            return mk_term(
                OR,
                (
                    mk_term(IN_SET, (o, f, ls.children[0])),
                    mk_term(IN_SET, (o, f, ls.children[1])),
                ),
            )
        if ls.op == ARRAY_RANGE:
            arr_t, lo, hi = ls.children
            parts = []
            if arr_t != o:
                parts.append(mk_term(EQ, (o, arr_t)))
            if f.op == ARR:
                idx = f.children[0]
                parts.append(mk_compare("<=", lo, idx))
                parts.append(mk_compare("<=", idx, hi))
            else:
                from ..logic import ARR_IDX, IS_ARR_IDX

                parts.append(mk_term(IS_ARR_IDX, (f,)))
                parts.append(mk_compare("<=", lo, mk_term(ARR_IDX, (f,))))
                parts.append(mk_compare("<=", mk_term(ARR_IDX, (f,)), hi))
            return mk_and(parts)
        if ls.op == ALL_LOCS:
            return TRUE
        return None

    make_rewrite(
        "inSetExpand", RuleCategory.PURE_REWRITE,
        lambda t: t.op == IN_SET,
        in_result,
    )

    make_rewrite(
        "arrIdxArr", RuleCategory.PURE_REWRITE,
        lambda t: t.op.name == "arrIdx" and t.children[0].op == ARR,
        lambda g, t: t.children[0].children[0],
    )

    def is_arr_result(g, t):
        inner = t.children[0]
        if inner.op == ARR:
            return TRUE
        if inner.op.kind is OpKind.CONSTANT:
            return FALSE
        return None

    make_rewrite(
        "isArrIdxEval", RuleCategory.PURE_REWRITE,
        lambda t: t.op.name == "isArrIdx",
        is_arr_result,
    )

    def field_eq_result(g, t):
        fd = _field_distinct(t.children[0], t.children[1])
        if fd is True:
            return FALSE
        if t.children[0].op == ARR and t.children[1].op == ARR:
            return mk_term(EQ, (t.children[0].children[0], t.children[1].children[0]))
        return None

    make_rewrite(
        "fieldEq", RuleCategory.PURE_REWRITE,
        lambda t: t.op == EQ and t.children[0].sort.kind == "field",
        field_eq_result,
    )


# ---------------------------------------------------------------------------
# conditional term split
# ---------------------------------------------------------------------------


def _mk_split_if():
    def matcher(goal, focus, t):
        return (
            t.op == ITE
            and not under_binder(goal.sequent, focus)
            and not _has_bound_vars(t.children[0])
        )

    def applier(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        cond = t.children[0]
        old = goal.sequent.side(app.focus.side)[app.focus.index]
        out = []
        for label, assume, branch in (
            ("Condition True", cond, t.children[1]),
            ("Condition False", negate_formula(cond), t.children[2]),
        ):
            seq = replace_at(goal.sequent, app.focus, branch)
            seq = seq.with_added("ante", assume)
            info = transfer_meta(goal.info, old, [seq.side(app.focus.side)[app.focus.index]])
            info = info.record_formulas([assume])
            out.append(ChildGoal(seq, info, label))
        return out

    make_structural("splitIf", matcher, applier, ("Condition True", "Condition False"))
    REGISTRY["splitIf"].top_level = False


def _has_bound_vars(t: Term) -> bool:
    return any(s.op.kind is OpKind.BOUND_VAR for s in t.subterms())


# ---------------------------------------------------------------------------
# quantifier rules
# ---------------------------------------------------------------------------


def instantiate_bound(body: Term, var: Operator, value: Term) -> Term:
    """Substitute a bound variable, respecting shadowing binders."""

    def go(t: Term) -> Term:
        if t.op == var:
            return value
        if t.op.kind is OpKind.QUANTIFIER and t.op.payload == var:
            return t
        if not t.children:
            return t
        kids = tuple(go(c) for c in t.children)
        if kids == t.children:
            return t
        return Term(t.op, kids, t.sort, t.origins)

    return simplify(go(body))


def _mk_quantifier_rules():
    def all_right_matcher(goal, focus, t):
        return focus.side == "succ" and _top(focus) and t.op.kind is OpKind.QUANTIFIER and t.op.name == "forall"

    def all_right(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        var: Operator = t.op.payload
        name = app.inst("as") or fresh.fresh(var.name.split("_")[0])
        sk = skolem(str(name), var.payload)
        inst = instantiate_bound(t.children[0], var, sk)
        seq = goal.sequent.with_replaced("succ", app.focus.index, inst)
        info = transfer_meta(goal.info, t, [inst])
        return [ChildGoal(seq, info)]

    make_structural("allRight", all_right_matcher, all_right)

    def ex_left_matcher(goal, focus, t):
        return focus.side == "ante" and _top(focus) and t.op.kind is OpKind.QUANTIFIER and t.op.name == "exists"

    def ex_left(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        var: Operator = t.op.payload
        name = app.inst("as")
        if name:
            fresh.claim(str(name))
        else:
            name = fresh.fresh(var.name.split("_")[0])
        sk = skolem(str(name), var.payload)
        inst = instantiate_bound(t.children[0], var, sk)
        seq = goal.sequent.with_replaced("ante", app.focus.index, inst)
        info = transfer_meta(goal.info, t, [inst])
        return [ChildGoal(seq, info)]

    make_structural("exLeft", ex_left_matcher, ex_left)

    def all_left_matcher(goal, focus, t):
        return focus.side == "ante" and _top(focus) and t.op.kind is OpKind.QUANTIFIER and t.op.name == "forall"

    def all_left(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        term = app.inst("term")
        if not isinstance(term, Term):
            raise CalculusError("allLeft requires a 'term' instantiation")
        if _has_bound_vars(term):
            raise CalculusError("instantiation term must be ground")
        inst = instantiate_bound(t.children[0], t.op.payload, term)
        seq = goal.sequent.with_added("ante", inst)
        info = goal.info.record_formulas([inst])
        info = info.evolve(insts_done=info.insts_done | {(t, term)})
        return [ChildGoal(seq, info)]

    make_structural("allLeft", all_left_matcher, all_left)

    def ex_right_matcher(goal, focus, t):
        return focus.side == "succ" and _top(focus) and t.op.kind is OpKind.QUANTIFIER and t.op.name == "exists"

    def ex_right(goal, app, fresh):
        t = resolve_focus(goal.sequent, app.focus)
        term = app.inst("term")
        if not isinstance(term, Term):
            raise CalculusError("exRight requires a 'term' instantiation")
        if _has_bound_vars(term):
            raise CalculusError("instantiation term must be ground")
        inst = instantiate_bound(t.children[0], t.op.payload, term)
        seq = goal.sequent.with_added("succ", inst)
        info = goal.info.record_formulas([inst])
        info = info.evolve(insts_done=info.insts_done | {(t, term)})
        return [ChildGoal(seq, info)]

    make_structural("exRight", ex_right_matcher, ex_right)


_mk_and_left()
_mk_or_right()
_mk_imp_right()
_mk_not_left()
_mk_not_right()
_mk_or_left()
_mk_and_right()
_mk_imp_left()
_mk_deletions()
_mk_closing()
_mk_eq_rules()
_mk_select_rules()
_mk_locset_rules()
_mk_split_if()
_mk_quantifier_rules()
