"""Translation of specification expressions into logic terms.

Every operator created for an AST node carries an origin reference with that
node's exact span, so provenance is assigned at the lowest possible level
while the terms are being created.  Comparisons are normalized to the
polynomial form `poly > c` here, which is what turns `0 <= to` into the
internal term `to > -1`; the verbatim rendering pathway reverses this by
re-translating the original source text and comparing terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .frontend import ast
from .logic import (
    ADD, AND, ARR, EQ, IMP, IMOD, INT, INTDIV, LENGTH, MUL, NOT, OR, SELECT,
    BOOL, NULL_TERM, TRUE,
    OpKind, OriginKind, OriginRef, Sort, Term, Update,
    apply_update, bound_var, class_inv_op, class_sort, int_lit, mk_and,
    mk_compare, mk_term, norm_int, pv_term, quantifier_op, simplify,
)
from .logic import INT_ARRAY as SORT_INT_ARRAY
from .logic import HEAP as SORT_HEAP


class TranslateError(Exception):
    def __init__(self, span: Optional[ast.Span], message: str):
        where = f"{span}: " if span else ""
        super().__init__(f"{where}{message}")
        self.span = span
        self.message = message


def sort_of_type(t: ast.TypeRef) -> Sort:
    if t.kind is ast.Type.INT:
        return INT
    if t.kind is ast.Type.BOOLEAN:
        return BOOL
    if t.kind is ast.Type.INT_ARRAY:
        return SORT_INT_ARRAY
    if t.kind is ast.Type.OBJECT:
        return class_sort(t.class_name or "Object")
    raise TranslateError(None, f"no sort for type {t}")


def field_term(cls: ast.ClassDecl, name: str) -> Term:
    from .logic import field_const

    decl = cls.field(name)
    if decl is None:
        raise TranslateError(None, f"unknown field {name!r} in class {cls.name}")
    return field_const(f"{cls.name}::${name}", sort_of_type(decl.type))


@dataclass
class TEnv:
    """Everything the translator needs to resolve names and states.

    When `state` is set, every program-variable reference is resolved through
    that update at the leaf, producing a fully state-applied term in one
    pass; `\\old(e, label)` subexpressions simply switch to the recorded
    snapshot update.  With `state` unset the result ranges over program
    variables, for formulas placed inside a modality.
    """

    unit: ast.SourceUnit
    cls: ast.ClassDecl
    method: Optional[ast.MethodDecl]
    values: dict[str, Term]              # variable name -> current value term
    var_types: dict[str, ast.TypeRef]    # variable name -> declared type
    heap_term: Term
    self_term: Optional[Term] = None
    result_term: Optional[Term] = None
    old_heap: Optional[Term] = None
    old_values: dict[str, Term] = field(default_factory=dict)
    label_states: dict[str, Update] = field(default_factory=dict)
    line_states: dict[int, Update] = field(default_factory=dict)
    origin: Callable[[ast.Span], frozenset[OriginRef]] = lambda span: frozenset()
    bound: dict[str, Term] = field(default_factory=dict)
    state: Optional[Update] = None

    def resolve(self, t: Term) -> Term:
        if self.state is not None:
            return apply_update(self.state, t)
        return t


def origin_maker(kind: OriginKind, file: str, occurrence: int = 0):
    def make(span: ast.Span) -> frozenset[OriginRef]:
        return frozenset({OriginRef(kind, file, span, occurrence)})

    return make


def user_origin(file: str):
    """Origins for user-supplied formulas: labeled, but never positioned."""
    refs = frozenset({OriginRef(OriginKind.USER_INTERACTION, file)})
    return lambda span: refs


def implicit_origin() -> frozenset[OriginRef]:
    return frozenset({OriginRef(OriginKind.IMPLICIT)})


def translate(expr: ast.Expr, env: TEnv) -> Term:
    """Translate and normalize a specification expression."""
    return simplify(_tr(expr, env))


def _obj_class(expr: ast.Expr, env: TEnv) -> ast.ClassDecl:
    t = _static_type(expr, env)
    if t is None or t.kind is not ast.Type.OBJECT or t.class_name is None:
        raise TranslateError(expr.span, "expression is not a class object")
    cls = env.unit.find_class(t.class_name)
    if cls is None:
        raise TranslateError(expr.span, f"unknown class {t.class_name!r}")
    return cls


def _static_type(expr: ast.Expr, env: TEnv) -> Optional[ast.TypeRef]:
    if isinstance(expr, ast.ThisRef):
        return ast.TypeRef(ast.Type.OBJECT, env.cls.name)
    if isinstance(expr, ast.Name):
        if expr.ident in env.bound:
            return ast.TypeRef(ast.Type.INT)
        if expr.ident in env.var_types:
            return env.var_types[expr.ident]
        f = env.cls.field(expr.ident)
        if f is not None:
            return f.type
        return None
    if isinstance(expr, ast.FieldAccess):
        cls = env.cls if expr.receiver is None else _obj_class(expr.receiver, env)
        f = cls.field(expr.field)
        return f.type if f else None
    if isinstance(expr, (ast.ArrayAccess, ast.ArrayLength, ast.IntLit)):
        return ast.TypeRef(ast.Type.INT)
    if isinstance(expr, ast.Old):
        return _static_type(expr.operand, env)
    if isinstance(expr, ast.ResultRef):
        return env.method.return_type if env.method else None
    if isinstance(expr, ast.NullLit):
        return ast.TypeRef(ast.Type.OBJECT, None)
    return None


def _tr(e: ast.Expr, env: TEnv) -> Term:
    org = env.origin(e.span)

    if isinstance(e, ast.IntLit):
        return int_lit(e.value).with_origins(org)
    if isinstance(e, ast.BoolLit):
        from .logic import FALSE

        return (TRUE if e.value else FALSE).with_origins(org)
    if isinstance(e, ast.NullLit):
        return NULL_TERM.with_origins(org)
    if isinstance(e, ast.ThisRef):
        if env.self_term is None:
            raise TranslateError(e.span, "'this' in static context")
        return env.resolve(env.self_term).with_added_origins(org)
    if isinstance(e, ast.ResultRef):
        if env.result_term is None:
            raise TranslateError(e.span, "\\result not available here")
        return env.resolve(env.result_term).with_added_origins(org)
    if isinstance(e, ast.Name):
        if e.ident in env.bound:
            return env.bound[e.ident].with_origins(org)
        if e.ident in env.values:
            return env.resolve(env.values[e.ident]).with_added_origins(org)
        if env.cls.field(e.ident) is not None:
            if env.self_term is None:
                raise TranslateError(e.span, f"field {e.ident!r} in static context")
            fld = field_term(env.cls, e.ident)
            return mk_term(
                SELECT,
                (env.resolve(env.heap_term), env.resolve(env.self_term), fld),
                org,
            )
        raise TranslateError(e.span, f"unknown name {e.ident!r}")
    if isinstance(e, ast.FieldAccess):
        if e.receiver is None or isinstance(e.receiver, ast.ThisRef):
            if env.self_term is None:
                raise TranslateError(e.span, "'this' in static context")
            recv = env.resolve(env.self_term)
            cls = env.cls
        else:
            cls = _obj_class(e.receiver, env)
            recv = _tr(e.receiver, env)
        fld = field_term(cls, e.field)
        return mk_term(SELECT, (env.resolve(env.heap_term), recv, fld), org)
    if isinstance(e, ast.ArrayAccess):
        arr = _tr(e.array, env)
        idx = norm_int(_tr(e.index, env))
        return mk_term(
            SELECT, (env.resolve(env.heap_term), arr, mk_term(ARR, (idx,))), org
        )
    if isinstance(e, ast.ArrayLength):
        return mk_term(LENGTH, (_tr(e.array, env),), org)
    if isinstance(e, ast.Unary):
        if e.op == "!":
            return mk_term(NOT, (_tr(e.operand, env),), org)
        return norm_int(mk_term(MUL, (int_lit(-1), _tr(e.operand, env)))).with_origins(org)
    if isinstance(e, ast.Binary):
        return _tr_binary(e, env, org)
    if isinstance(e, ast.Chain):
        parts = []
        for i, op in enumerate(e.ops):
            lo, hi = e.operands[i], e.operands[i + 1]
            span = lo.span.cover(hi.span)
            parts.append(
                mk_compare(op, _tr(lo, env), _tr(hi, env), env.origin(span))
            )
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = mk_term(AND, (p, out), org)
        return out
    if isinstance(e, ast.Quantifier):
        bv = bound_var(_fresh_bound_name(e.var_name, env), INT)
        inner = replace(env, bound={**env.bound, e.var_name: bv})
        body = _tr(e.body, inner)
        if e.range is not None:
            rng = _tr(e.range, inner)
            if e.kind == "forall":
                body = mk_term(IMP, (rng, body), org)
            else:
                body = mk_term(AND, (rng, body), org)
        return mk_term(quantifier_op(e.kind, bv.op), (body,), org)
    if isinstance(e, ast.Old):
        return _tr_old(e, env, org)
    if isinstance(e, ast.InvariantFor):
        cls = _obj_class(e.operand, env)
        obj = _tr(e.operand, env)
        return mk_term(class_inv_op(cls.name), (env.resolve(env.heap_term), obj), org)
    raise TranslateError(e.span, f"cannot translate {type(e).__name__}")


def _fresh_bound_name(name: str, env: TEnv) -> str:
    if name not in env.bound:
        return name
    i = 1
    while f"{name}_{i}" in env.bound:
        i += 1
    return f"{name}_{i}"


def _tr_binary(e: ast.Binary, env: TEnv, org) -> Term:
    if e.op in ("<", "<=", ">", ">="):
        return mk_compare(e.op, _tr(e.left, env), _tr(e.right, env), org)
    l = _tr(e.left, env)
    r = _tr(e.right, env)
    if e.op == "+":
        return norm_int(mk_term(ADD, (l, r))).with_origins(org)
    if e.op == "-":
        return norm_int(mk_term(ADD, (l, mk_term(MUL, (int_lit(-1), r))))).with_origins(org)
    if e.op == "*":
        return norm_int(mk_term(MUL, (l, r))).with_origins(org)
    if e.op == "/":
        return mk_term(INTDIV, (norm_int(l), norm_int(r)), org)
    if e.op == "%":
        return mk_term(IMOD, (norm_int(l), norm_int(r)), org)
    if e.op == "==":
        if l.sort.kind == "int":
            return mk_term(EQ, (norm_int(l), norm_int(r)), org)
        return mk_term(EQ, (l, r), org)
    if e.op == "!=":
        if l.sort.kind == "int":
            eq = mk_term(EQ, (norm_int(l), norm_int(r)), org)
        else:
            eq = mk_term(EQ, (l, r), org)
        return mk_term(NOT, (eq,), org)
    if e.op == "&&":
        return mk_term(AND, (l, r), org)
    if e.op == "||":
        return mk_term(OR, (l, r), org)
    if e.op == "==>":
        return mk_term(IMP, (l, r), org)
    raise TranslateError(e.span, f"unknown operator {e.op!r}")


def _tr_old(e: ast.Old, env: TEnv, org) -> Term:
    if e.label is not None or e.at_line is not None:
        if env.state is None:
            raise TranslateError(
                e.span, "\\old with a label or line is only supported in "
                "formulas evaluated against a recorded program state"
            )
        if e.label is not None:
            if e.label not in env.label_states:
                raise TranslateError(e.span, f"no state recorded for label {e.label!r}")
            snapshot = env.label_states[e.label]
        else:
            if e.at_line not in env.line_states:
                raise TranslateError(e.span, f"no state recorded for line {e.at_line}")
            snapshot = env.line_states[e.at_line]
        at = replace(env, state=snapshot)
        return _tr(e.operand, at).with_added_origins(org)
    if env.old_heap is None:
        raise TranslateError(e.span, "\\old not available here")
    pre = replace(env, heap_term=env.old_heap,
                  values={**env.values, **env.old_values})
    return _tr(e.operand, pre).with_added_origins(org)
