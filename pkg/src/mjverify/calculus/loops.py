"""Loop invariant rule and method contract rule.

Both abstract concrete code by its specification: the heap is anonymized
over the declared assignable locations with a fresh anonymization heap, and
written local variables get fresh copies.  Loop invariant conjuncts are
split at source-level `&&` so each keeps a crisp origin; the copy assumed in
the preserves branch and the copy to re-establish are distinguished by
occurrence tags on otherwise identical origin references.
"""

from __future__ import annotations

from typing import Optional

from ..frontend import ast
from ..logic import (
    ALL_LOCS, ANON, EQ, HEAP, NOT, NULL_TERM, OriginKind, OriginRef, Term,
    apply_update, diamond, int_lit, mk_and, mk_compare, mk_gt, mk_term,
    negate_formula, pv_term, program_var, skolem, update_app, ModProgram,
)
from ..pogen import translate_locations
from ..translate import TEnv, origin_maker, sort_of_type, translate
from .base import CalculusError, ChildGoal, GoalState, NodeInfo, PathStep
from .rules import transfer_meta
from .symexec import (
    SECtx, body_env, collect_checks, check_goal, continue_goal, current_value,
    path_step, se_rule, step_info,
)


def split_and_exprs(e: ast.Expr) -> list[ast.Expr]:
    """Top-level `&&` conjuncts of a specification expression."""
    if isinstance(e, ast.Binary) and e.op == "&&":
        return split_and_exprs(e.left) + split_and_exprs(e.right)
    return [e]


def _invariant_exprs(spec: ast.LoopSpec) -> list[ast.Expr]:
    out = []
    for clause in spec.invariants:
        out.extend(split_and_exprs(clause.expr))
    return out


def _body_items(stmt: ast.While):
    if isinstance(stmt.body, ast.Block):
        return stmt.body.stmts
    return (stmt.body,)


def _loop_invariant(ctx: SECtx):
    stmt: ast.While = ctx.stmt
    po = ctx.po
    spec = stmt.spec
    if spec is None or not spec.invariants:
        raise CalculusError(
            f"{po.unit.path}:{stmt.line}: while loop needs a loop_invariant "
            "(only the invariant-based loop treatment is supported)"
        )
    if spec.decreases is None:
        raise CalculusError(
            f"{po.unit.path}:{stmt.line}: while loop needs a decreases clause "
            "for the total-correctness proof"
        )

    checks = collect_checks([stmt.cond], ctx)

    # fresh copies for every scoped variable the body may write
    written = assigned_in_scope(ctx, stmt)
    havoc: list[tuple] = []
    var_copies = dict(ctx.info.var_copies)
    u_havoc = ctx.update
    for name in written:
        base_op = ctx.info.scope[name]
        copy_op = program_var(ctx.fresh.fresh(name), base_op.payload)
        before = current_value(ctx, base_op)
        copy_term = pv_term(copy_op)
        u_havoc = u_havoc.extended(base_op, copy_term)
        havoc.append((base_op, before, copy_term))
        var_copies[copy_op] = (base_op, stmt.line)

    # anonymize the assignable locations over a fresh heap
    env_locs = body_env(ctx.goal, po, OriginKind.ASSIGNABLE, state=ctx.update)
    locset, _ = translate_locations(spec.assignable, env_locs)
    locset_term = mk_term(ALL_LOCS, ()) if locset is None else locset
    anon_heap = skolem(ctx.fresh.fresh("anonHeap"), HEAP)
    heap_before = ctx.heap_term()
    anon_term = mk_term(ANON, (heap_before, locset_term, anon_heap))
    u_body = u_havoc.extended(po.heap_var, anon_term)

    inv_exprs = _invariant_exprs(spec)

    def translated(kind: OriginKind, occ: int, update) -> list[Term]:
        env = body_env(ctx.goal, po, kind, occ, state=update)
        return [translate(e, env) for e in inv_exprs]

    def guard_at(update) -> Term:
        env = body_env(ctx.goal, po, OriginKind.LOOP_GUARD, state=update)
        return translate(stmt.cond, env)

    step = PathStep(
        line=stmt.line, span=stmt.span, heap_created=anon_term,
        var_events=tuple(havoc), update_before=ctx.update,
        update_after=u_body, is_anon=True,
    )

    out = [check_goal(ctx, c) for c in checks]

    # 1: the invariant holds on entry
    init_formula = mk_and(
        translated(OriginKind.LOOP_INVARIANT_INITIAL, 0, ctx.update)
    )
    seq1 = ctx.goal.sequent.with_replaced("succ", ctx.fidx, init_formula)
    info1 = ctx.info.record_formulas([init_formula])
    out.append(ChildGoal(seq1, info1, "Invariant Initially Valid"))

    # 2: the body preserves the invariant and decreases the measure
    assumed = [guard_at(u_body)] + translated(
        OriginKind.LOOP_INVARIANT_PRESERVED, 0, u_body
    )
    dec_env = body_env(ctx.goal, po, OriginKind.DECREASES)
    dec_raw = translate(spec.decreases.expr, dec_env)
    dec_org = frozenset(
        {OriginRef(OriginKind.DECREASES, po.unit.path, spec.decreases.span)}
    )
    measure_pre = apply_update(u_body, dec_raw)
    to_prove = _raw_invariants(
        ctx, inv_exprs, OriginKind.LOOP_INVARIANT_PRESERVED, occ=1
    ) + [
        mk_gt(measure_pre, dec_raw, dec_org),
        mk_compare(">=", dec_raw, int_lit(0), dec_org),
    ]
    info2 = step_info(ctx, step, var_copies=var_copies)
    child2 = continue_goal(
        ctx, u_body, _body_items(stmt), info2,
        extra_ante=tuple(assumed), label="Body Preserves Invariant",
        new_post=mk_and(to_prove),
    )
    out.append(child2)

    # 3: continue after the loop under invariant and negated guard
    neg_guard = negate_formula(guard_at(u_body))
    assumed3 = [neg_guard] + translated(OriginKind.LOOP_INVARIANT_USE, 0, u_body)
    info3 = step_info(ctx, step, var_copies=var_copies)
    child3 = continue_goal(
        ctx, u_body, ctx.program.items[1:], info3,
        extra_ante=tuple(assumed3), label="Use Case",
    )
    out.append(child3)
    return out


def _raw_invariants(ctx: SECtx, inv_exprs, kind: OriginKind, occ: int = 0) -> list[Term]:
    env = body_env(ctx.goal, ctx.po, kind, occ)
    return [translate(e, env) for e in inv_exprs]


def assigned_in_scope(ctx: SECtx, stmt: ast.While) -> list[str]:
    from ..pogen import assigned_variables

    written = assigned_variables([stmt.body])
    return [name for name in written if name in ctx.info.scope]


# ---------------------------------------------------------------------------
# method contract rule
# ---------------------------------------------------------------------------


def _resolve_callee(ctx: SECtx, stmt: ast.Call):
    po = ctx.po
    if stmt.receiver is None or isinstance(stmt.receiver, ast.ThisRef):
        cls = po.cls
    else:
        env = body_env(ctx.goal, po, OriginKind.ASSUME)
        from ..translate import _obj_class

        cls = _obj_class(stmt.receiver, env)
    callee = cls.method(stmt.method)
    if callee is None:
        raise CalculusError(f"unknown method {stmt.method!r}")
    return cls, callee


def _method_contract(ctx: SECtx):
    stmt: ast.Call = ctx.stmt
    po = ctx.po
    cls, callee = _resolve_callee(ctx, stmt)
    c = callee.contract
    if not (c.requires or c.ensures or c.assignable):
        raise CalculusError(
            f"{po.unit.path}:{stmt.line}: call to {callee.name!r} needs a contract"
        )

    env = body_env(ctx.goal, po, OriginKind.ASSUME, state=ctx.update)
    checks = collect_checks(list(stmt.args) + [stmt.receiver], ctx)

    arg_terms = [translate(a, env) for a in stmt.args]
    if stmt.receiver is None or isinstance(stmt.receiver, ast.ThisRef):
        if po.self_var is None and not callee.is_static:
            raise CalculusError("instance call in static method")
        recv = pv_term(po.self_var) if po.self_var is not None else None
    else:
        recv = translate(stmt.receiver, env)
    heap_pre = ctx.heap_term()

    def callee_env(kind: OriginKind, heap_term, result_term=None) -> TEnv:
        return TEnv(
            unit=po.unit, cls=cls, method=callee,
            values={p.name: t for p, t in zip(callee.params, arg_terms)},
            var_types={p.name: p.type for p in callee.params},
            heap_term=heap_term, self_term=recv,
            result_term=result_term, old_heap=heap_pre,
            origin=origin_maker(kind, po.unit.path),
        )

    out = [check_goal(ctx, chk) for chk in checks]

    # branch 1: prove the callee's precondition (and argument well-typedness)
    pre_env = callee_env(OriginKind.REQUIRES, heap_pre)
    pre_parts = [translate(r.expr, pre_env) for r in c.requires]
    imp = frozenset({OriginRef(OriginKind.IMPLICIT)})
    for p, t in zip(callee.params, arg_terms):
        if p.type.kind in (ast.Type.INT_ARRAY, ast.Type.OBJECT):
            pre_parts.append(mk_term(NOT, (mk_term(EQ, (t, NULL_TERM)),), imp))
    if callee is po.method and c.measured_by is not None:
        dec_org = frozenset(
            {OriginRef(OriginKind.DECREASES, po.unit.path, c.measured_by.span)}
        )
        callee_m = translate(c.measured_by.expr, callee_env(OriginKind.DECREASES, heap_pre))
        # caller's measure over the entry values of its parameters
        entry_env = body_env(ctx.goal, po, OriginKind.DECREASES)
        entry_values = dict(entry_env.values)
        for name, op in po.old_param_vars.items():
            entry_values[name] = pv_term(op)
        entry_env.values = entry_values
        entry_env.heap_term = pv_term(po.prestate_heap_var)
        entry_env.state = ctx.update
        caller_m = translate(c.measured_by.expr, entry_env)
        pre_parts.append(mk_compare(">=", callee_m, int_lit(0), dec_org))
        pre_parts.append(mk_gt(caller_m, callee_m, dec_org))
    pre_formula = mk_and(pre_parts)
    seq_pre = ctx.goal.sequent.with_removed("succ", ctx.fidx).with_added("succ", pre_formula)
    info_pre = ctx.info.record_formulas([pre_formula]).evolve(pending_span=stmt.call_span)
    out.append(ChildGoal(seq_pre, info_pre, "Precondition"))

    # branch 2: assume the postcondition over the anonymized heap and go on
    env_locs = callee_env(OriginKind.ASSIGNABLE, heap_pre)
    locset, _ = translate_locations(c.assignable, env_locs)
    locset_term = mk_term(ALL_LOCS, ()) if locset is None else locset
    anon_heap = skolem(ctx.fresh.fresh("anonHeap"), HEAP)
    heap_post = mk_term(ANON, (heap_pre, locset_term, anon_heap))
    new_update = ctx.update.extended(po.heap_var, heap_post)

    result_term = None
    events: tuple = ()
    var_copies = dict(ctx.info.var_copies)
    if stmt.result is not None:
        if not isinstance(stmt.result, ast.Name) or stmt.result.ident not in ctx.info.scope:
            raise CalculusError("call results must be assigned to a local variable")
        base_op = ctx.info.scope[stmt.result.ident]
        copy_op = program_var(ctx.fresh.fresh(stmt.result.ident), base_op.payload)
        before = current_value(ctx, base_op)
        result_term = pv_term(copy_op)
        new_update = new_update.extended(base_op, result_term)
        events = ((base_op, before, result_term),)
        var_copies[copy_op] = (base_op, stmt.line)

    post_env = callee_env(OriginKind.ENSURES, heap_post, result_term)
    assumed = [translate(e.expr, post_env) for e in c.ensures]

    step = PathStep(
        line=stmt.line, span=stmt.span, heap_created=heap_post,
        var_events=events, update_before=ctx.update, update_after=new_update,
        is_anon=True,
    )
    info_post = step_info(ctx, step, var_copies=var_copies)
    out.append(
        continue_goal(
            ctx, new_update, ctx.program.items[1:], info_post,
            extra_ante=tuple(assumed), label="Post (use)",
        )
    )
    return out


def register_loop_rules():
    se_rule(
        "loopInvariant", ast.While, _loop_invariant,
        ("Invariant Initially Valid", "Body Preserves Invariant", "Use Case"),
    )
    se_rule("methodContract", ast.Call, _method_contract, ("Precondition", "Post (use)"))
