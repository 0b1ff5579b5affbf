"""Symbolic execution rules: statements inside diamond modalities.

The symbolic state is a single normalized parallel update in front of the
modality; executing a statement extends the update and the proof node's
bookkeeping (executed path, heap-term lines, variable copies, label states).
Runtime obligations (array bounds, null dereference, nonzero divisor) split
off as check branches carrying assert-kind origins with the access's span.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..frontend import ast
from ..logic import (
    ALL_LOCS, ANON, ARR, EQ, HEAP, NOT, NULL_TERM, SELECT, STORE,
    ModProgram, Operator, OpKind, OriginKind, OriginRef, Sequent, Term,
    Update, diamond, int_lit, mk_and, mk_compare, mk_gt, mk_term,
    negate_formula, apply_update, pv_term, program_var, skolem, update_app,
    LENGTH, EntryCall,
)
from ..pogen import ProofObligation, assigned_variables, translate_locations
from ..translate import TEnv, origin_maker, sort_of_type, translate
from .base import (
    CalculusError, ChildGoal, Focus, FreshNames, GoalState, NodeInfo,
    PathStep, RuleApplication,
)
from .rules import REGISTRY, Rule, RuleCategory, register, transfer_meta


def find_modality(sequent: Sequent):
    """Locate the active `{U}<{ ... }>phi` formula in the succedent."""
    for i, t in enumerate(sequent.succedent):
        if t.op.kind is OpKind.UPDATE and t.children[0].op.kind is OpKind.MODALITY:
            return i, t.op.payload, t.children[0]
        if t.op.kind is OpKind.MODALITY:
            from ..logic import EMPTY_UPDATE

            return i, EMPTY_UPDATE, t
    return None


def unwrap_labels(item):
    labels = []
    while isinstance(item, ast.Labeled):
        labels.append(item.label)
        item = item.stmt
    return labels, item


@dataclass
class SECtx:
    goal: GoalState
    po: ProofObligation
    fresh: FreshNames
    fidx: int
    update: Update
    program: ModProgram
    post: Term
    labels: list[str]
    stmt: object  # head statement, labels stripped

    @property
    def info(self) -> NodeInfo:
        return self.goal.info

    def heap_term(self) -> Term:
        return apply_update(self.update, pv_term(self.po.heap_var))


def _ctx(goal: GoalState, app: RuleApplication) -> SECtx:
    found = find_modality(goal.sequent)
    if found is None or app.focus.side != "succ" or app.focus.index != found[0]:
        raise CalculusError("focus is not the active modality")
    fidx, update, mod = found
    program: ModProgram = mod.op.payload
    head = program.head()
    if head is None:
        labels, stmt = [], None
    else:
        labels, stmt = unwrap_labels(head)
    return SECtx(goal, goal.po, None, fidx, update, program, mod.children[0], labels, stmt)


def body_env(goal: GoalState, po: ProofObligation, kind: OriginKind, occ: int = 0,
             state=None) -> TEnv:
    values = {name: pv_term(op) for name, op in goal.info.scope.items()}
    old_values = {n: pv_term(op) for n, op in po.old_param_vars.items()}
    return TEnv(
        unit=po.unit, cls=po.cls, method=po.method,
        values=values, var_types=dict(goal.info.var_types),
        heap_term=pv_term(po.heap_var),
        self_term=pv_term(po.self_var) if po.self_var else None,
        old_heap=pv_term(po.prestate_heap_var), old_values=old_values,
        label_states=dict(goal.info.label_states),
        line_states=dict(goal.info.line_states),
        origin=origin_maker(kind, po.unit.path, occ),
        state=state,
    )


def initial_node_info(po: ProofObligation) -> NodeInfo:
    info = NodeInfo(
        entry_line=po.method.header_line,
        scope={p.name: po.param_vars[p.name] for p in po.method.params},
        var_types={p.name: p.type for p in po.method.params},
    )
    info = info.record_formulas(po.root_sequent.antecedent, gap=0)
    info = info.record_formulas(po.root_sequent.succedent, gap=0)
    return info


# ---------------------------------------------------------------------------
# runtime checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    label: str
    formula: Term  # fully state-applied
    span: ast.Span


def collect_checks(exprs, ctx: SECtx) -> list[Check]:
    """Well-definedness obligations for evaluating program expressions."""
    po = ctx.po
    env = body_env(ctx.goal, po, OriginKind.ASSERT, state=ctx.update)
    checks: list[Check] = []
    seen: set[tuple[str, Term]] = set()

    def is_self(term: Term) -> bool:
        return po.self_var is not None and term == pv_term(po.self_var)

    def emit(label: str, formula: Term, span: ast.Span):
        from ..logic import TRUE

        applied = formula
        if applied == TRUE:
            return
        key = (label, applied)
        if key in seen:
            return
        seen.add(key)
        checks.append(Check(label, applied, span))

    def walk(e: ast.Expr):
        org = frozenset({OriginRef(OriginKind.ASSERT, po.unit.path, e.span)})
        if isinstance(e, ast.ArrayAccess):
            walk(e.array)
            walk(e.index)
            arr = translate(e.array, env)
            idx = translate(e.index, env)
            if not is_self(arr):
                emit(
                    "Null Reference Check",
                    mk_term(NOT, (mk_term(EQ, (arr, NULL_TERM)),), org),
                    e.array.span,
                )
            lo = mk_compare("<=", int_lit(0), idx, org)
            hi = mk_compare("<", idx, mk_term(LENGTH, (arr,)), org)
            from ..logic import AND

            emit("Index In Bounds", mk_term(AND, (lo, hi), org), e.span)
        elif isinstance(e, ast.ArrayLength):
            walk(e.array)
            arr = translate(e.array, env)
            if not is_self(arr):
                emit(
                    "Null Reference Check",
                    mk_term(NOT, (mk_term(EQ, (arr, NULL_TERM)),), org),
                    e.array.span,
                )
        elif isinstance(e, ast.FieldAccess):
            if e.receiver is not None and not isinstance(e.receiver, ast.ThisRef):
                walk(e.receiver)
                recv = translate(e.receiver, env)
                if not is_self(recv):
                    emit(
                        "Null Reference Check",
                        mk_term(NOT, (mk_term(EQ, (recv, NULL_TERM)),), org),
                        e.receiver.span,
                    )
        elif isinstance(e, ast.Binary):
            walk(e.left)
            walk(e.right)
            if e.op in ("/", "%"):
                div = translate(e.right, env)
                emit(
                    "Divisor Nonzero",
                    mk_term(NOT, (mk_term(EQ, (div, int_lit(0))),), org),
                    e.right.span,
                )
        elif isinstance(e, ast.Unary):
            walk(e.operand)
        elif isinstance(e, ast.Name) or isinstance(e, (ast.IntLit, ast.BoolLit, ast.NullLit, ast.ThisRef)):
            pass

    for e in exprs:
        if e is not None:
            walk(e)
    return checks


def check_goal(ctx: SECtx, check: Check) -> ChildGoal:
    seq = ctx.goal.sequent.with_removed("succ", ctx.fidx)
    seq = seq.with_added("succ", check.formula)
    info = ctx.info.record_formulas([check.formula])
    info = info.evolve(pending_span=check.span)
    return ChildGoal(seq, info, check.label)


def continue_goal(
    ctx: SECtx,
    new_update: Update,
    new_items,
    info: Optional[NodeInfo] = None,
    extra_ante: tuple = (),
    label: str = "",
    new_post: Optional[Term] = None,
) -> ChildGoal:
    info = info if info is not None else ctx.info
    old_formula = ctx.goal.sequent.succedent[ctx.fidx]
    prog = ModProgram(tuple(new_items), ctx.program.unit)
    post = ctx.post if new_post is None else new_post
    formula = update_app(new_update, diamond(prog, post))
    seq = ctx.goal.sequent.with_replaced("succ", ctx.fidx, formula)
    if extra_ante:
        seq = seq.with_added("ante", *extra_ante)
    info = transfer_meta(info, old_formula, [formula])
    if extra_ante:
        info = info.record_formulas(extra_ante)
    return ChildGoal(seq, info, label)


def path_step(
    ctx: SECtx,
    stmt,
    update_after: Update,
    heap_created: Optional[Term] = None,
    var_events: tuple = (),
    is_anon: bool = False,
) -> PathStep:
    return PathStep(
        line=stmt.span.start_line,
        span=stmt.span,
        heap_created=heap_created,
        var_events=var_events,
        update_before=ctx.update,
        update_after=update_after,
        is_anon=is_anon,
    )


def step_info(ctx: SECtx, step: PathStep, **extra) -> NodeInfo:
    line_states = dict(ctx.info.line_states)
    line_states.setdefault(step.line, step.update_before)
    heap_lines = dict(ctx.info.heap_lines)
    if step.heap_created is not None:
        heap_lines[step.heap_created] = step.line
    info = ctx.info.evolve(
        path=ctx.info.path + (step,),
        line_states=line_states,
        heap_lines=heap_lines,
        pending_span=None,
    )
    if extra:
        info = info.evolve(**extra)
    return info


def current_value(ctx: SECtx, op: Operator) -> Term:
    bound = ctx.update.get(op)
    return bound if bound is not None else pv_term(op)


# ---------------------------------------------------------------------------
# the statement rules
# ---------------------------------------------------------------------------


def se_rule(rule_id: str, stmt_type, applier, branch_labels=()):
    def matcher(goal: GoalState, focus: Focus, term: Term) -> bool:
        found = find_modality(goal.sequent)
        if found is None or focus.side != "succ" or focus.index != found[0] or focus.path != ():
            return False
        head = found[2].op.payload.head()
        if head is None:
            return stmt_type is None
        if stmt_type is None:
            return False
        _, stmt = unwrap_labels(head)
        return isinstance(stmt, stmt_type)

    def wrapped(goal: GoalState, app: RuleApplication, fresh: FreshNames):
        ctx = _ctx(goal, app)
        ctx.fresh = fresh
        for label in ctx.labels:
            ctx.goal = GoalState(
                ctx.goal.sequent,
                ctx.info.evolve(
                    label_states={**ctx.info.label_states, label: ctx.update}
                ),
                ctx.goal.po,
            )
        return applier(ctx)

    return register(
        Rule(rule_id, RuleCategory.SYMBOLIC_EXECUTION, matcher, wrapped,
             branch_labels, top_level=True)
    )


def _expand_entry(ctx: SECtx):
    po = ctx.po
    method = po.method
    step = PathStep(
        line=method.header_line, span=None, heap_created=None,
        var_events=(), update_before=ctx.update, update_after=ctx.update,
    )
    heap_lines = dict(ctx.info.heap_lines)
    heap_lines[pv_term(po.heap_var)] = method.header_line
    line_states = dict(ctx.info.line_states)
    line_states.setdefault(method.header_line, ctx.update)
    info = ctx.info.evolve(
        path=ctx.info.path + (step,), heap_lines=heap_lines, line_states=line_states
    )
    return [continue_goal(ctx, ctx.update, method.body, info)]


def _local_decl(ctx: SECtx):
    stmt: ast.LocalDecl = ctx.stmt
    checks = collect_checks([stmt.init], ctx)
    var_op = ctx.info.scope.get(stmt.name)
    if var_op is None or var_op.payload != sort_of_type(stmt.type):
        var_op = program_var(stmt.name, sort_of_type(stmt.type))
    new_update = ctx.update
    events = ()
    if stmt.init is not None:
        env = body_env_with(ctx, OriginKind.ASSUME, state=ctx.update)
        value = translate(stmt.init, env)
        before = current_value(ctx, var_op)
        new_update = ctx.update.extended(var_op, value)
        events = ((var_op, before, value),)
    step = path_step(ctx, stmt, new_update, var_events=events)
    info = step_info(ctx, step)
    info = info.evolve(
        scope={**info.scope, stmt.name: var_op},
        var_types={**info.var_types, stmt.name: stmt.type},
    )
    out = [check_goal(ctx, c) for c in checks]
    out.append(continue_goal(ctx, new_update, ctx.program.items[1:], info))
    return out


def body_env_with(ctx: SECtx, kind: OriginKind, occ: int = 0, state=None) -> TEnv:
    return body_env(ctx.goal, ctx.po, kind, occ, state=state)


def _lvalue_kind(ctx: SECtx, target: ast.Expr):
    """Classify an assignment target: local variable, field, or array element."""
    if isinstance(target, ast.Name):
        if target.ident in ctx.info.scope:
            return "local", ctx.info.scope[target.ident]
        if ctx.po.cls.field(target.ident) is not None:
            return "field", target.ident
        raise CalculusError(f"unknown assignment target {target.ident!r}")
    if isinstance(target, ast.FieldAccess):
        return "fieldaccess", target
    if isinstance(target, ast.ArrayAccess):
        return "array", target
    raise CalculusError("unsupported assignment target")


def _assign(ctx: SECtx):
    stmt = ctx.stmt
    if isinstance(stmt, ast.Increment):
        target = stmt.target
        value_expr = None
    else:
        target = stmt.target
        value_expr = stmt.value
    env = body_env_with(ctx, OriginKind.ASSUME, state=ctx.update)
    kind = _lvalue_kind(ctx, target)

    check_exprs = [value_expr]
    if isinstance(target, ast.ArrayAccess):
        check_exprs += [target]
    elif isinstance(target, ast.FieldAccess):
        check_exprs += [target]
    checks = collect_checks(check_exprs, ctx)

    if value_expr is not None:
        value = translate(value_expr, env)
    else:
        # increment / decrement
        from ..logic import ADD
        from ..logic import simplify as _simplify

        old = translate(target, env)
        value = _simplify(mk_term(ADD, (old, int_lit(stmt.delta))))

    heap_created = None
    events: tuple = ()
    if kind[0] == "local":
        var_op = kind[1]
        before = current_value(ctx, var_op)
        new_update = ctx.update.extended(var_op, value)
        events = ((var_op, before, value),)
    else:
        heap = ctx.heap_term()
        if kind[0] == "field":
            from ..translate import field_term

            recv = pv_term(ctx.po.self_var)
            fld = field_term(ctx.po.cls, kind[1])
        elif kind[0] == "fieldaccess":
            fa: ast.FieldAccess = kind[1]
            from ..translate import _obj_class, field_term

            if fa.receiver is None or isinstance(fa.receiver, ast.ThisRef):
                recv = pv_term(ctx.po.self_var)
                fld = field_term(ctx.po.cls, fa.field)
            else:
                recv = translate(fa.receiver, env)
                fld = field_term(_obj_class(fa.receiver, env), fa.field)
        else:
            aa: ast.ArrayAccess = kind[1]
            recv = translate(aa.array, env)
            idx = translate(aa.index, env)
            fld = mk_term(ARR, (idx,))
        heap_created = mk_term(STORE, (heap, recv, fld, value))
        new_update = ctx.update.extended(ctx.po.heap_var, heap_created)
    step = path_step(ctx, stmt, new_update, heap_created=heap_created, var_events=events)
    info = step_info(ctx, step)
    out = [check_goal(ctx, c) for c in checks]
    out.append(continue_goal(ctx, new_update, ctx.program.items[1:], info))
    return out


def _if_else(ctx: SECtx):
    stmt: ast.IfElse = ctx.stmt
    env = body_env_with(ctx, OriginKind.ASSUME, state=ctx.update)
    checks = collect_checks([stmt.cond], ctx)
    guard = translate(stmt.cond, env)
    neg_guard = negate_formula(guard)
    rest = ctx.program.items[1:]
    out = [check_goal(ctx, c) for c in checks]
    for label, assume, body in (
        ("Then Branch", guard, stmt.then_body),
        ("Else Branch", neg_guard, stmt.else_body),
    ):
        items = ((body,) if body is not None else ()) + rest
        step = path_step(ctx, stmt, ctx.update)
        info = step_info(ctx, step)
        out.append(
            continue_goal(ctx, ctx.update, items, info, extra_ante=(assume,), label=label)
        )
    return out


def _return(ctx: SECtx):
    stmt: ast.Return = ctx.stmt
    env = body_env_with(ctx, OriginKind.ASSUME, state=ctx.update)
    new_update = ctx.update
    events: tuple = ()
    if stmt.value is not None:
        if ctx.po.result_var is None:
            raise CalculusError("return value in void method")
        value = translate(stmt.value, env)
        before = current_value(ctx, ctx.po.result_var)
        new_update = ctx.update.extended(ctx.po.result_var, value)
        events = ((ctx.po.result_var, before, value),)
    step = path_step(ctx, stmt, new_update, var_events=events)
    info = step_info(ctx, step)
    # remaining statements are unreachable after a return
    return [continue_goal(ctx, new_update, (), info)]


def _block(ctx: SECtx):
    stmt: ast.Block = ctx.stmt
    items = stmt.stmts + ctx.program.items[1:]
    return [continue_goal(ctx, ctx.update, items, ctx.info)]


def _assume(ctx: SECtx):
    stmt: ast.Assume = ctx.stmt
    env = body_env_with(ctx, OriginKind.ASSUME, state=ctx.update)
    formula = translate(stmt.expr, env)
    step = path_step(ctx, stmt, ctx.update)
    info = step_info(ctx, step)
    return [
        continue_goal(ctx, ctx.update, ctx.program.items[1:], info, extra_ante=(formula,))
    ]


def _assert(ctx: SECtx):
    stmt: ast.Assert = ctx.stmt
    env_prove = body_env_with(ctx, OriginKind.ASSERT, occ=0, state=ctx.update)
    to_prove = translate(stmt.expr, env_prove)
    env_assume = body_env_with(ctx, OriginKind.ASSERT, occ=1, state=ctx.update)
    assumed = translate(stmt.expr, env_assume)

    seq1 = ctx.goal.sequent.with_removed("succ", ctx.fidx).with_added("succ", to_prove)
    info1 = ctx.info.record_formulas([to_prove]).evolve(pending_span=stmt.span)
    valid = ChildGoal(seq1, info1, "Assert Valid")

    step = path_step(ctx, stmt, ctx.update)
    info2 = step_info(ctx, step)
    cont = continue_goal(
        ctx, ctx.update, ctx.program.items[1:], info2, extra_ante=(assumed,),
        label="Assert Holds",
    )
    return [valid, cont]


def _empty(ctx: SECtx):
    applied = apply_update(ctx.update, ctx.post)
    old_formula = ctx.goal.sequent.succedent[ctx.fidx]
    seq = ctx.goal.sequent.with_replaced("succ", ctx.fidx, applied)
    info = ctx.info.record_formulas([applied])
    return [ChildGoal(seq, info)]


def register_se_rules():
    se_rule("expandEntry", EntryCall, _expand_entry)
    se_rule("seLocalDecl", ast.LocalDecl, _local_decl)
    se_rule("seAssign", (ast.Assign, ast.Increment), _assign)
    se_rule(
        "ifElseSplit", ast.IfElse, _if_else, ("Then Branch", "Else Branch")
    )
    se_rule("seReturn", ast.Return, _return)
    se_rule("seBlock", ast.Block, _block)
    se_rule("assumeStmt", ast.Assume, _assume)
    se_rule("assertStmt", ast.Assert, _assert, ("Assert Valid", "Assert Holds"))
    se_rule("emptyModality", None, _empty)
    from .loops import register_loop_rules

    register_loop_rules()


register_se_rules()
