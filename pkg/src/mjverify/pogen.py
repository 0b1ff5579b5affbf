"""Proof obligation generation from method contracts.

The root sequent has the translated requires clauses and the implicit
assumptions in the antecedent, and a diamond modality over the method entry
call in the succedent, with postcondition and frame condition inside.  Every
operator translated from a specification clause carries that clause's span;
implicit conjuncts carry implicit origins and never render at source level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .frontend import ast
from .logic import (
    ADD, AND, ARR, ARRAY_RANGE, EMPTY_LOCS, EQ, FIELD, IMP, IN_SET, LENGTH,
    NOT, OBJECT, SELECT, SINGLETON, TRUE, UNION, WELL_FORMED,
    CREATED_FIELD, HEAP, NULL_TERM,
    EntryCall, ModProgram, Operator, OriginKind, OriginRef, Sequent, Term,
    Update, bound_var, class_sort, diamond, exact_instance_op, int_lit,
    mk_and, mk_compare, mk_term, norm_int, program_var, pv_term,
    quantifier_op, update_app,
)
from .translate import (
    TEnv, TranslateError, _obj_class, field_term, origin_maker, sort_of_type,
    translate,
)

INT_MIN = -2147483648
INT_MAX = 2147483647


class PogenError(Exception):
    pass


@dataclass
class ProofObligation:
    unit: ast.SourceUnit
    cls: ast.ClassDecl
    method: ast.MethodDecl
    root_sequent: Sequent
    heap_var: Operator
    prestate_heap_var: Operator
    self_var: Optional[Operator]
    param_vars: dict[str, Operator]
    old_param_vars: dict[str, Operator]
    result_var: Optional[Operator]
    initial_update: Update
    frame_formula: Optional[Term]

    @property
    def name(self) -> str:
        return f"{self.cls.name}.{self.method.name}"


def assigned_variables(stmts) -> set[str]:
    """Names of locals/parameters assigned anywhere in the statements."""
    out: set[str] = set()

    def lvalue(e: ast.Expr):
        if isinstance(e, ast.Name):
            out.add(e.ident)

    def walk(s: ast.Stmt):
        if isinstance(s, ast.Assign):
            lvalue(s.target)
        elif isinstance(s, ast.Increment):
            lvalue(s.target)
        elif isinstance(s, ast.LocalDecl):
            out.add(s.name)
        elif isinstance(s, ast.Call):
            if s.result is not None:
                lvalue(s.result)
        elif isinstance(s, ast.Block):
            for c in s.stmts:
                walk(c)
        elif isinstance(s, ast.Labeled):
            walk(s.stmt)
        elif isinstance(s, ast.IfElse):
            walk(s.then_body)
            if s.else_body:
                walk(s.else_body)
        elif isinstance(s, ast.While):
            walk(s.body)

    for s in stmts:
        walk(s)
    return out


def implicit_assumptions(
    unit: ast.SourceUnit, cls: ast.ClassDecl, method: ast.MethodDecl,
    heap: Term, self_term: Optional[Term], params: dict[str, Term],
) -> list[Term]:
    """Assumptions with no source-level counterpart, all marked implicit."""
    imp = lambda: frozenset({OriginRef(OriginKind.IMPLICIT)})
    # every operator is marked implicit so decompositions stay implicit too
    out = [mk_term(WELL_FORMED, (heap,), imp())]
    if self_term is not None:
        out.append(
            mk_term(NOT, (mk_term(EQ, (self_term, NULL_TERM), imp()),), imp())
        )
        out.append(
            mk_term(
                EQ,
                (mk_term(SELECT, (heap, self_term, CREATED_FIELD), imp()), TRUE),
                imp(),
            )
        )
        out.append(mk_term(exact_instance_op(cls.name), (self_term,), imp()))
    for p in method.params:
        value = params[p.name]
        if p.type.kind is ast.Type.INT:
            rng = mk_term(
                AND,
                (
                    mk_compare(">=", value, int_lit(INT_MIN), imp()),
                    mk_compare("<=", value, int_lit(INT_MAX), imp()),
                ),
                imp(),
            )
            out.append(rng)
        elif p.type.kind in (ast.Type.INT_ARRAY, ast.Type.OBJECT):
            out.append(
                mk_term(NOT, (mk_term(EQ, (value, NULL_TERM), imp()),), imp())
            )
            if p.type.kind is ast.Type.INT_ARRAY:
                out.append(
                    mk_compare(">=", mk_term(LENGTH, (value,), imp()), int_lit(0), imp())
                )
            else:
                out.append(
                    mk_term(
                        EQ,
                        (mk_term(SELECT, (heap, value, CREATED_FIELD), imp()), TRUE),
                        imp(),
                    )
                )
    return out


def translate_locations(
    clauses: tuple[ast.SpecClause, ...], env: TEnv
) -> tuple[Optional[Term], Optional[ast.SpecClause]]:
    """Location set term for assignable clauses.

    Returns (None, clause) when the clause denotes \\everything (no frame
    condition applies); an empty clause list also means \\everything by
    the MiniSpec default.
    """
    if not clauses:
        return None, None
    parts: list[Term] = []
    first = clauses[0]
    for clause in clauses:
        for loc in clause.locations:
            org = env.origin(loc.span)
            if isinstance(loc, ast.LocEverything):
                return None, clause
            if isinstance(loc, ast.LocNothing):
                continue
            if isinstance(loc, ast.LocField):
                if loc.receiver is None or isinstance(loc.receiver, ast.ThisRef):
                    if env.self_term is None:
                        raise TranslateError(loc.span, "field location in static context")
                    recv = env.self_term
                    cls = env.cls
                else:
                    cls = _obj_class(loc.receiver, env)
                    recv = translate(loc.receiver, env)
                parts.append(mk_term(SINGLETON, (recv, field_term(cls, loc.field)), org))
            elif isinstance(loc, ast.LocArrayAll):
                arr = translate(loc.array, env)
                length = mk_term(LENGTH, (arr,))
                hi_term = norm_int(mk_term(ADD, (length, int_lit(-1))))
                parts.append(mk_term(ARRAY_RANGE, (arr, int_lit(0), hi_term), org))
            elif isinstance(loc, ast.LocArrayRange):
                arr = translate(loc.array, env)
                lo = translate(loc.lo, env)
                hi = translate(loc.hi, env)
                parts.append(mk_term(ARRAY_RANGE, (arr, lo, hi), org))
            elif isinstance(loc, ast.LocArrayIndex):
                arr = translate(loc.array, env)
                idx = translate(loc.index, env)
                parts.append(mk_term(SINGLETON, (arr, mk_term(ARR, (idx,))), org))
    if not parts:
        return mk_term(EMPTY_LOCS, (), env.origin(first.span)), first
    out = parts[0]
    for p in parts[1:]:
        out = mk_term(UNION, (out, p), env.origin(first.span))
    return out, first


def frame_condition(locset: Term, post_heap: Term, pre_heap: Term, org) -> Term:
    """`all o,f not in the set read the same in both heaps`.

    This formula quantifies over fields, which has no specification-language
    counterpart; the renderer reports it as untranslatable by design.
    """
    o = bound_var("fo", OBJECT)
    f = bound_var("ff", FIELD)
    body = mk_term(
        IMP,
        (
            mk_term(NOT, (mk_term(IN_SET, (o, f, locset)),), org),
            mk_term(
                EQ,
                (mk_term(SELECT, (post_heap, o, f)), mk_term(SELECT, (pre_heap, o, f))),
                org,
            ),
        ),
        org,
    )
    inner = mk_term(quantifier_op("forall", f.op), (body,), org)
    return mk_term(quantifier_op("forall", o.op), (inner,), org)


def generate_po(unit: ast.SourceUnit, method_name: str) -> ProofObligation:
    found = unit.find_method(method_name)
    if found is None:
        raise PogenError(f"unknown method {method_name!r}")
    cls, method = found
    path = unit.path

    heap_var = program_var("heap", HEAP)
    heap = pv_term(heap_var)
    pre_heap_var = program_var("heapAtPre", HEAP)
    pre_heap = pv_term(pre_heap_var)
    self_var = None
    self_term = None
    if not method.is_static:
        self_var = program_var("self", class_sort(cls.name))
        self_term = pv_term(self_var)
    param_vars = {p.name: program_var(p.name, sort_of_type(p.type)) for p in method.params}
    params = {name: pv_term(v) for name, v in param_vars.items()}
    result_var = None
    result_term = None
    if method.return_type.kind is not ast.Type.VOID:
        result_var = program_var("res", sort_of_type(method.return_type))
        result_term = pv_term(result_var)

    assigned = assigned_variables(method.body)
    old_param_vars = {
        p.name: program_var(f"{p.name}_old", sort_of_type(p.type))
        for p in method.params
        if p.name in assigned
    }
    old_values = {
        name: pv_term(v) for name, v in old_param_vars.items()
    }

    bindings: list[tuple[Operator, Term]] = [(pre_heap_var, heap)]
    for name, var in old_param_vars.items():
        bindings.append((var, params[name]))
    initial_update = Update(bindings)

    var_types = {p.name: p.type for p in method.params}

    def env_with(kind: OriginKind, **kw) -> TEnv:
        return TEnv(
            unit=unit, cls=cls, method=method,
            values=dict(params), var_types=dict(var_types),
            heap_term=heap, self_term=self_term,
            origin=origin_maker(kind, path), **kw,
        )

    # antecedent: implicit assumptions, then one formula per requires clause
    antecedent = implicit_assumptions(unit, cls, method, heap, self_term, params)
    env_pre = env_with(OriginKind.REQUIRES, old_heap=heap)
    for clause in method.contract.requires:
        antecedent.append(translate(clause.expr, env_pre))

    # postcondition conjuncts, evaluated in the modality's final state
    post_parts: list[Term] = []
    env_post = env_with(
        OriginKind.ENSURES,
        result_term=result_term, old_heap=pre_heap, old_values=old_values,
    )
    for clause in method.contract.ensures:
        post_parts.append(translate(clause.expr, env_post))

    env_frame = env_with(OriginKind.ASSIGNABLE, old_heap=pre_heap, old_values=old_values)
    # assignable locations denote prestate locations
    env_frame.heap_term = pre_heap
    env_frame.values = {**params, **old_values}
    frame = None
    locset, clause = translate_locations(method.contract.assignable, env_frame)
    if locset is not None:
        org = frozenset({OriginRef(OriginKind.ASSIGNABLE, path, clause.span)})
        frame = frame_condition(locset, heap, pre_heap, org)
        post_parts.append(frame)

    post = mk_and(post_parts)
    modality = diamond(
        ModProgram((EntryCall(cls.name, method.name),), unit), post
    )
    succedent = [update_app(initial_update, modality)]
    return ProofObligation(
        unit=unit, cls=cls, method=method,
        root_sequent=Sequent(antecedent, succedent),
        heap_var=heap_var, prestate_heap_var=pre_heap_var,
        self_var=self_var, param_vars=param_vars,
        old_param_vars=old_param_vars, result_var=result_var,
        initial_update=initial_update, frame_formula=frame,
    )
