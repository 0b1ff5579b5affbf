"""AST for MiniJava + MiniSpec annotations.

Every node carries a Span pointing at the exact source region it was parsed
from; slicing the file at a node's span reproduces the original text.  The
AST is immutable after parsing and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    """Half-open region of a source file, 1-based lines and columns.

    end_col is the column one past the last character, so a span's text is
    recovered by slicing between the two offsets.
    """

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if (self.end_line, self.end_col) < (self.start_line, self.start_col):
            raise ValueError(f"span ends before it starts: {self}")

    def cover(self, other: "Span") -> "Span":
        lo = min((self.start_line, self.start_col), (other.start_line, other.start_col))
        hi = max((self.end_line, self.end_col), (other.end_line, other.end_col))
        return Span(self.file, lo[0], lo[1], hi[0], hi[1])

    def __str__(self):
        return f"{self.file}:{self.start_line}:{self.start_col}"


def slice_span(text: str, span: Span) -> str:
    """Exact substring of `text` covered by `span` (pure; raises on overflow)."""
    lines = text.split("\n")
    if span.end_line - 1 >= len(lines) + (0 if span.end_col == 1 else -0):
        if span.end_line > len(lines):
            raise IndexError(f"span {span} outside file")
    if span.start_line == span.end_line:
        line = lines[span.start_line - 1]
        if span.end_col - 1 > len(line):
            raise IndexError(f"span {span} outside line")
        return line[span.start_col - 1 : span.end_col - 1]
    parts = [lines[span.start_line - 1][span.start_col - 1 :]]
    for ln in range(span.start_line + 1, span.end_line):
        parts.append(lines[ln - 1])
    last = lines[span.end_line - 1]
    if span.end_col - 1 > len(last):
        raise IndexError(f"span {span} outside line")
    parts.append(last[: span.end_col - 1])
    return "\n".join(parts)


@dataclass(frozen=True)
class Diagnostic:
    span: Span
    message: str

    def __str__(self):
        return f"{self.span}: {self.message}"


class Type(Enum):
    INT = "int"
    BOOLEAN = "boolean"
    INT_ARRAY = "int[]"
    VOID = "void"
    OBJECT = "object"  # refined by class_name where present

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TypeRef:
    """Declared type: a base kind plus the class name for object types."""

    kind: Type
    class_name: Optional[str] = None

    def __str__(self):
        return self.class_name if self.kind is Type.OBJECT else self.kind.value


# --------------------------------------------------------------------------
# Expressions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    span: Span


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class NullLit(Expr):
    pass


@dataclass(frozen=True)
class Name(Expr):
    """Unqualified identifier; resolved by the type checker to a local,
    parameter, or an implicit `this` field."""

    ident: str


@dataclass(frozen=True)
class FieldAccess(Expr):
    receiver: Optional[Expr]  # None = explicit `this`
    field: str


@dataclass(frozen=True)
class ArrayAccess(Expr):
    array: Expr
    index: Expr


@dataclass(frozen=True)
class ArrayLength(Expr):
    array: Expr


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # '-', '!'
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # '+','-','*','/','%','<','<=','>','>=','==','!=','&&','||','==>'
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Chain(Expr):
    """Chained comparison like `0 <= i < n`: operands interleaved with ops."""

    operands: tuple[Expr, ...]
    ops: tuple[str, ...]  # len(operands) - 1 entries, each '<' or '<='


@dataclass(frozen=True)
class Quantifier(Expr):
    kind: str  # 'forall' | 'exists'
    var_type: TypeRef
    var_name: str
    range: Optional[Expr]  # optional range predicate
    body: Expr


@dataclass(frozen=True)
class Old(Expr):
    """\\old(e), \\old(e, label) or \\old<line>(e)."""

    operand: Expr
    label: Optional[str] = None
    at_line: Optional[int] = None


@dataclass(frozen=True)
class ResultRef(Expr):
    pass


@dataclass(frozen=True)
class ThisRef(Expr):
    pass


@dataclass(frozen=True)
class InvariantFor(Expr):
    operand: Expr


# --------------------------------------------------------------------------
# Assignable location expressions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LocExpr:
    span: Span


@dataclass(frozen=True)
class LocNothing(LocExpr):
    pass


@dataclass(frozen=True)
class LocEverything(LocExpr):
    pass


@dataclass(frozen=True)
class LocField(LocExpr):
    receiver: Optional[Expr]  # None = this
    field: str


@dataclass(frozen=True)
class LocArrayAll(LocExpr):
    array: Expr  # a[*]


@dataclass(frozen=True)
class LocArrayRange(LocExpr):
    array: Expr
    lo: Expr
    hi: Expr  # a[lo..hi], inclusive bounds


@dataclass(frozen=True)
class LocArrayIndex(LocExpr):
    array: Expr
    index: Expr


# --------------------------------------------------------------------------
# Specification clauses
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecClause:
    """One contract clause; raw_text is the verbatim file substring of span."""

    kind: str  # 'requires' | 'ensures' | 'assignable' | 'measured_by' | ...
    span: Span
    raw_text: str
    expr: Optional[Expr] = None
    locations: tuple[LocExpr, ...] = ()


@dataclass(frozen=True)
class Contract:
    requires: tuple[SpecClause, ...] = ()
    ensures: tuple[SpecClause, ...] = ()
    assignable: tuple[SpecClause, ...] = ()
    measured_by: Optional[SpecClause] = None


@dataclass(frozen=True)
class LoopSpec:
    invariants: tuple[SpecClause, ...] = ()
    assignable: tuple[SpecClause, ...] = ()
    decreases: Optional[SpecClause] = None


# --------------------------------------------------------------------------
# Statements
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Stmt:
    span: Span

    @property
    def line(self) -> int:
        """The single source line of the statement (shape rule: one per line)."""
        return self.span.start_line


@dataclass(frozen=True)
class LocalDecl(Stmt):
    type: TypeRef
    name: str
    init: Optional[Expr]


@dataclass(frozen=True)
class Assign(Stmt):
    target: Expr  # Name, FieldAccess or ArrayAccess
    value: Expr


@dataclass(frozen=True)
class Increment(Stmt):
    """x++ / ++x / x-- / --x as a statement; sugar for x = x +/- 1."""

    target: Expr
    delta: int


@dataclass(frozen=True)
class IfElse(Stmt):
    cond: Expr
    then_body: "Stmt"
    else_body: Optional["Stmt"]


@dataclass(frozen=True)
class While(Stmt):
    cond: Expr
    body: "Stmt"
    spec: Optional[LoopSpec]


@dataclass(frozen=True)
class Call(Stmt):
    result: Optional[Expr]  # assignment target or None
    receiver: Optional[Expr]  # None = this / static
    method: str
    args: tuple[Expr, ...]
    call_span: Span  # span of just `recv.m(args)`


@dataclass(frozen=True)
class Return(Stmt):
    value: Optional[Expr]


@dataclass(frozen=True)
class Assert(Stmt):
    expr: Expr
    raw_text: str
    by_script: Optional[str] = None  # raw text of an attached \by {...} block
    by_span: Optional[Span] = None


@dataclass(frozen=True)
class Assume(Stmt):
    expr: Expr
    raw_text: str


@dataclass(frozen=True)
class Labeled(Stmt):
    label: str
    stmt: "Stmt"


@dataclass(frozen=True)
class Block(Stmt):
    stmts: tuple["Stmt", ...]


# --------------------------------------------------------------------------
# Declarations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    name: str
    type: TypeRef
    span: Span


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type: TypeRef
    span: Span


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple[Param, ...]
    return_type: TypeRef
    body: tuple[Stmt, ...]
    contract: Contract
    is_static: bool
    span: Span
    header_line: int  # line of the signature; symbolic execution entry point

    def labels(self) -> dict[str, Stmt]:
        found: dict[str, Stmt] = {}

        def walk(s: Stmt):
            if isinstance(s, Labeled):
                found[s.label] = s.stmt
                walk(s.stmt)
            elif isinstance(s, Block):
                for c in s.stmts:
                    walk(c)
            elif isinstance(s, IfElse):
                walk(s.then_body)
                if s.else_body:
                    walk(s.else_body)
            elif isinstance(s, While):
                walk(s.body)

        for s in self.body:
            walk(s)
        return found


@dataclass(frozen=True)
class ClassDecl:
    name: str
    fields: tuple[FieldDecl, ...]
    methods: tuple[MethodDecl, ...]
    invariants: tuple[SpecClause, ...]
    span: Span

    def field(self, name: str) -> Optional[FieldDecl]:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    def method(self, name: str) -> Optional[MethodDecl]:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class SourceUnit:
    path: str
    raw_text: str
    classes: tuple[ClassDecl, ...]

    def span_text(self, span: Span) -> str:
        return slice_span(self.raw_text, span)

    def find_method(self, name: str) -> Optional[tuple[ClassDecl, MethodDecl]]:
        for c in self.classes:
            m = c.method(name)
            if m is not None:
                return c, m
        return None

    def find_class(self, name: str) -> Optional[ClassDecl]:
        for c in self.classes:
            if c.name == name:
                return c
        return None
