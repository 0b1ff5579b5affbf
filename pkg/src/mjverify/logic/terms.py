"""Sorted terms with per-occurrence origin labels.

Terms are immutable operator trees.  Each node records the set of origin
references for its operator occurrence; origins never participate in
structural equality, so rule matching is insensitive to provenance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator, Optional

from ..frontend.ast import Span


class SortError(Exception):
    pass


@dataclass(frozen=True)
class Sort:
    name: str
    kind: str  # 'int','bool','heap','object','field','locset','any'

    def __str__(self):
        return self.name


INT = Sort("int", "int")
BOOL = Sort("bool", "bool")
HEAP = Sort("Heap", "heap")
OBJECT = Sort("Object", "object")
NULL = Sort("Null", "object")
FIELD = Sort("Field", "field")
LOCSET = Sort("LocSet", "locset")
ANY = Sort("any", "any")
INT_ARRAY = Sort("int[]", "object")


def class_sort(name: str) -> Sort:
    return Sort(name, "object")


def compatible(a: Sort, b: Sort) -> bool:
    """Whether two sorts may meet in an equation or a store."""
    if a == b or a.kind == "any" or b.kind == "any":
        return True
    return a.kind == "object" and b.kind == "object"


class OriginKind(Enum):
    REQUIRES = "requires"
    ENSURES = "ensures"
    ASSIGNABLE = "assignable"
    DECREASES = "decreases"
    LOOP_INVARIANT_INITIAL = "loop_invariant_initial"
    LOOP_INVARIANT_PRESERVED = "loop_invariant_preserved"
    LOOP_INVARIANT_USE = "loop_invariant_use"
    LOOP_GUARD = "loop_guard"
    ASSERT = "assert"
    ASSUME = "assume"
    IMPLICIT = "implicit"
    USER_INTERACTION = "user_interaction"


@dataclass(frozen=True)
class OriginRef:
    """Provenance of one operator occurrence.

    Implicit origins carry no file or position; user-interaction origins may
    name the file but never a span.
    """

    kind: OriginKind
    file: Optional[str] = None
    span: Optional[Span] = None
    occurrence: int = 0

    def __post_init__(self):
        if self.kind is OriginKind.IMPLICIT and (self.file or self.span):
            raise ValueError("implicit origins carry no position")
        if self.kind is OriginKind.USER_INTERACTION and self.span is not None:
            raise ValueError("user-interaction origins carry no span")

    def __str__(self):
        where = f"@{self.span}" if self.span else ""
        occ = f"#{self.occurrence}" if self.occurrence else ""
        return f"{self.kind.value}{where}{occ}"


class OpKind(Enum):
    LOGICAL = "logical"
    RELATION = "relation"
    ARITH = "arith"
    HEAP_FN = "heap-fn"
    PROGRAM_VAR = "program-variable"
    CONSTANT = "constant"
    SKOLEM = "skolem-constant"
    QUANTIFIER = "quantifier"
    UPDATE = "update"
    MODALITY = "modality"
    BOUND_VAR = "bound-variable"


@dataclass(frozen=True)
class Operator:
    name: str
    kind: OpKind
    payload: Any = None  # sort for variables, value for literals, etc.

    def __str__(self):
        return self.name


class Term:
    """Immutable sorted term; equality and hashing ignore origin labels."""

    __slots__ = ("op", "children", "sort", "origins", "_hash")

    def __init__(self, op: Operator, children: tuple["Term", ...], sort: Sort,
                 origins: frozenset[OriginRef] = frozenset()):
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "sort", sort)
        object.__setattr__(self, "origins", origins)
        object.__setattr__(self, "_hash", hash((op, sort, children)))

    def __setattr__(self, *_):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.op == other.op
            and self.sort == other.sort
            and self.children == other.children
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        from .printing import term_to_str

        return term_to_str(self)

    # -- traversal ---------------------------------------------------------

    def subterms(self) -> Iterator["Term"]:
        yield self
        for c in self.children:
            yield from c.subterms()

    def contains(self, sub: "Term") -> bool:
        if self == sub:
            return True
        return any(c.contains(sub) for c in self.children)

    def with_origins(self, origins: Iterable[OriginRef]) -> "Term":
        return Term(self.op, self.children, self.sort, frozenset(origins))

    def with_added_origins(self, origins: Iterable[OriginRef]) -> "Term":
        return Term(self.op, self.children, self.sort, self.origins | frozenset(origins))

    def with_children(self, children: tuple["Term", ...]) -> "Term":
        return mk_term(self.op, children, self.origins)

    def replace(self, old: "Term", new: "Term") -> "Term":
        """Replace all structural occurrences of `old` by `new`."""
        if self == old:
            return new
        if not self.children:
            return self
        changed = False
        kids = []
        for c in self.children:
            r = c.replace(old, new)
            changed = changed or r is not c
            kids.append(r)
        if not changed:
            return self
        return Term(self.op, tuple(kids), self.sort, self.origins)


def origin_of(t: Term) -> frozenset[OriginRef]:
    """Origins of the operator, or the recursive union over the children."""
    if t.op.kind is OpKind.MODALITY:
        return t.origins
    if t.origins:
        return t.origins
    out: frozenset[OriginRef] = frozenset()
    for c in t.children:
        out |= origin_of(c)
    return out


def term_key(t: Term) -> str:
    """Deterministic ordering key, independent of origins."""
    if not t.children:
        return t.op.name
    return f"{t.op.name}({','.join(term_key(c) for c in t.children)})"


# ---------------------------------------------------------------------------
# Operator constructors and the signature table
# ---------------------------------------------------------------------------

AND = Operator("and", OpKind.LOGICAL)
OR = Operator("or", OpKind.LOGICAL)
NOT = Operator("not", OpKind.LOGICAL)
IMP = Operator("imp", OpKind.LOGICAL)
TRUE_OP = Operator("true", OpKind.LOGICAL)
FALSE_OP = Operator("false", OpKind.LOGICAL)
EQ = Operator("eq", OpKind.RELATION)
GT = Operator("gt", OpKind.RELATION)
ADD = Operator("add", OpKind.ARITH)
MUL = Operator("mul", OpKind.ARITH)
INTDIV = Operator("intdiv", OpKind.ARITH)
IMOD = Operator("imod", OpKind.ARITH)
SELECT = Operator("select", OpKind.HEAP_FN)
STORE = Operator("store", OpKind.HEAP_FN)
ANON = Operator("anon", OpKind.HEAP_FN)
WELL_FORMED = Operator("wellFormed", OpKind.HEAP_FN)
LENGTH = Operator("length", OpKind.HEAP_FN)
ARR = Operator("arr", OpKind.HEAP_FN)
ARR_IDX = Operator("arrIdx", OpKind.HEAP_FN)
IS_ARR_IDX = Operator("isArrIdx", OpKind.HEAP_FN)
EMPTY_LOCS = Operator("empty", OpKind.HEAP_FN)
SINGLETON = Operator("singleton", OpKind.HEAP_FN)
ARRAY_RANGE = Operator("arrayRange", OpKind.HEAP_FN)
UNION = Operator("union", OpKind.HEAP_FN)
IN_SET = Operator("inSet", OpKind.HEAP_FN)
ALL_LOCS = Operator("allLocs", OpKind.HEAP_FN)
ITE = Operator("ite", OpKind.LOGICAL)
NULL_OP = Operator("null", OpKind.CONSTANT, NULL)


def int_lit(value: int) -> Term:
    return Term(Operator(str(value), OpKind.CONSTANT, value), (), INT)


def program_var(name: str, sort: Sort) -> Operator:
    return Operator(name, OpKind.PROGRAM_VAR, sort)


def pv_term(op: Operator, origins: frozenset[OriginRef] = frozenset()) -> Term:
    assert op.kind is OpKind.PROGRAM_VAR
    return Term(op, (), op.payload, origins)


def skolem(name: str, sort: Sort) -> Term:
    return Term(Operator(name, OpKind.SKOLEM, sort), (), sort)


def bound_var(name: str, sort: Sort) -> Term:
    return Term(Operator(name, OpKind.BOUND_VAR, sort), (), sort)


def field_const(name: str, value_sort: Sort) -> Term:
    return Term(Operator(name, OpKind.CONSTANT, value_sort), (), FIELD)


CREATED_FIELD = field_const("$created", BOOL)


def quantifier_op(kind: str, var: Operator) -> Operator:
    assert kind in ("forall", "exists")
    return Operator(kind, OpKind.QUANTIFIER, var)


def class_inv_op(class_name: str) -> Operator:
    return Operator(f"inv_{class_name}", OpKind.HEAP_FN, class_name)


def exact_instance_op(class_name: str) -> Operator:
    return Operator(f"exactInstance_{class_name}", OpKind.HEAP_FN, class_name)


TRUE: Term
FALSE: Term


def _expect(cond: bool, msg: str):
    if not cond:
        raise SortError(msg)


def _infer_sort(op: Operator, children: tuple[Term, ...]) -> Sort:
    n = len(children)
    cs = [c.sort for c in children]

    def arity(k: int):
        _expect(n == k, f"{op.name} expects {k} arguments, got {n}")

    def all_of(kind: str):
        for c in cs:
            _expect(c.kind == kind or c.kind == "any",
                    f"{op.name}: expected {kind}, got {c}")

    if op.kind is OpKind.LOGICAL:
        if op in (TRUE_OP, FALSE_OP):
            arity(0)
            return BOOL
        if op == NOT:
            arity(1)
            all_of("bool")
            return BOOL
        if op == ITE:
            arity(3)
            _expect(cs[0].kind == "bool", "ite condition must be boolean")
            _expect(compatible(cs[1], cs[2]), "ite branches must agree")
            return cs[1] if cs[1] == cs[2] else ANY
        arity(2)
        all_of("bool")
        return BOOL
    if op == EQ:
        arity(2)
        _expect(compatible(cs[0], cs[1]), f"cannot equate {cs[0]} and {cs[1]}")
        return BOOL
    if op == GT:
        arity(2)
        all_of("int")
        return BOOL
    if op in (ADD, MUL, INTDIV, IMOD):
        arity(2)
        all_of("int")
        return INT
    if op == SELECT:
        arity(3)
        _expect(cs[0].kind == "heap", "select: first argument must be a heap")
        _expect(cs[1].kind in ("object", "any"), "select: second argument must be an object")
        _expect(cs[2].kind in ("field", "any"), "select: third argument must be a field")
        fld = children[2]
        if fld.op.kind is OpKind.CONSTANT and isinstance(fld.op.payload, Sort):
            return fld.op.payload
        if fld.op == ARR:
            return INT
        return ANY
    if op == STORE:
        arity(4)
        _expect(cs[0].kind == "heap", "store: first argument must be a heap")
        _expect(cs[1].kind in ("object", "any"), "store: second argument must be an object")
        _expect(cs[2].kind in ("field", "any"), "store: third argument must be a field")
        fld = children[2]
        if fld.op.kind is OpKind.CONSTANT and isinstance(fld.op.payload, Sort):
            _expect(compatible(cs[3], fld.op.payload), "store: value sort mismatch")
        return HEAP
    if op == ANON:
        arity(3)
        _expect(cs[0].kind == "heap" and cs[2].kind == "heap", "anon: heap arguments")
        _expect(cs[1].kind == "locset", "anon: second argument must be a locset")
        return HEAP
    if op == WELL_FORMED:
        arity(1)
        _expect(cs[0].kind == "heap", "wellFormed: heap argument")
        return BOOL
    if op == LENGTH:
        arity(1)
        _expect(cs[0].kind in ("object", "any"), "length: object argument")
        return INT
    if op == ARR:
        arity(1)
        all_of("int")
        return FIELD
    if op == ARR_IDX:
        arity(1)
        _expect(cs[0].kind == "field", "arrIdx: field argument")
        return INT
    if op == IS_ARR_IDX:
        arity(1)
        _expect(cs[0].kind == "field", "isArrIdx: field argument")
        return BOOL
    if op == EMPTY_LOCS or op == ALL_LOCS:
        arity(0)
        return LOCSET
    if op == SINGLETON:
        arity(2)
        _expect(cs[0].kind in ("object", "any"), "singleton: object argument")
        _expect(cs[1].kind in ("field", "any"), "singleton: field argument")
        return LOCSET
    if op == ARRAY_RANGE:
        arity(3)
        _expect(cs[0].kind in ("object", "any"), "arrayRange: array argument")
        _expect(cs[1].kind == "int" and cs[2].kind == "int", "arrayRange: int bounds")
        return LOCSET
    if op == UNION:
        arity(2)
        all_of("locset")
        return LOCSET
    if op == IN_SET:
        arity(3)
        _expect(cs[0].kind in ("object", "any"), "inSet: object argument")
        _expect(cs[1].kind in ("field", "any"), "inSet: field argument")
        _expect(cs[2].kind == "locset", "inSet: locset argument")
        return BOOL
    if op.kind is OpKind.QUANTIFIER:
        arity(1)
        all_of("bool")
        return BOOL
    if op.kind in (OpKind.PROGRAM_VAR, OpKind.CONSTANT, OpKind.SKOLEM, OpKind.BOUND_VAR):
        arity(0)
        if isinstance(op.payload, Sort):
            return op.payload
        if isinstance(op.payload, int):
            return INT
        raise SortError(f"constant {op.name} without sort")
    if op.kind is OpKind.UPDATE:
        arity(1)
        return cs[0]
    if op.kind is OpKind.MODALITY:
        arity(1)
        all_of("bool")
        return BOOL
    if op.kind is OpKind.HEAP_FN and op.name.startswith("inv_"):
        arity(2)
        _expect(cs[0].kind == "heap", "class invariant: heap argument")
        _expect(cs[1].kind in ("object", "any"), "class invariant: object argument")
        return BOOL
    if op.kind is OpKind.HEAP_FN and op.name.startswith("exactInstance_"):
        arity(1)
        _expect(cs[0].kind in ("object", "any"), "exactInstance: object argument")
        return BOOL
    raise SortError(f"unknown operator {op.name}")


def mk_term(op: Operator, children: Iterable[Term],
            origins: frozenset[OriginRef] = frozenset()) -> Term:
    """Construct a sort-checked term; raises SortError on signature mismatch."""
    kids = tuple(children)
    sort = _infer_sort(op, kids)
    return Term(op, kids, sort, origins)


TRUE = mk_term(TRUE_OP, ())
FALSE = mk_term(FALSE_OP, ())
NULL_TERM = Term(NULL_OP, (), NULL)


def conjuncts(t: Term) -> list[Term]:
    """Flatten the top-level conjunction structure of a formula."""
    if t.op == AND:
        return conjuncts(t.children[0]) + conjuncts(t.children[1])
    return [t]


def top_conjuncts(t: Term) -> list[Term]:
    """Split only on origin-free glue conjunctions.

    Conjunctions written by the user inside one clause carry that clause's
    origin on the `and` operator and stay together; the origin-free `and`
    nodes that merely join separate clauses are transparent.
    """
    if t.op == AND and not t.origins:
        return top_conjuncts(t.children[0]) + top_conjuncts(t.children[1])
    return [t]


def mk_and(parts: list[Term]) -> Term:
    parts = [p for p in parts if p != TRUE]
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = mk_term(AND, (p, out))
    return out
