"""Recursive-descent parser for MiniJava + MiniSpec.

Specification-only syntax (quantifiers, `==>`, chained comparisons, `\\old`,
`\\result`, `\\invariant_for`) is accepted only for tokens that came out of an
annotation comment; the lexer marks those with `in_spec`.
"""

from __future__ import annotations

from typing import Optional, Union

from . import ast
from .ast import Diagnostic, Span
from .lexer import LexError, Token, tokenize

_MODIFIERS = {"public", "private", "protected", "static", "final"}
_CONTRACT_CLAUSES = {"requires", "ensures", "assignable", "measured_by"}
_LOOP_CLAUSES = {"loop_invariant", "decreases"}
_TYPE_KEYWORDS = {"int", "boolean", "void"}


class ParseError(Exception):
    def __init__(self, span: Span, message: str):
        super().__init__(f"{span}: {message}")
        self.diagnostic = Diagnostic(span, message)


class Parser:
    def __init__(self, tokens: list[Token], text: str, path: str):
        self.tokens = tokens
        self.text = text
        self.path = path
        self.i = 0

    # ---- token plumbing -------------------------------------------------

    def peek(self, off: int = 0) -> Token:
        return self.tokens[min(self.i + off, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, kind: str, value: Optional[str] = None, off: int = 0) -> bool:
        t = self.peek(off)
        return t.kind == kind and (value is None or t.value == value)

    def at_op(self, value: str, off: int = 0) -> bool:
        return self.at("op", value, off)

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        t = self.peek()
        if t.kind != kind or (value is not None and t.value != value):
            want = value if value is not None else kind
            raise ParseError(t.span, f"expected {want!r}, found {t.value or t.kind!r}")
        return self.next()

    def expect_op(self, value: str) -> Token:
        return self.expect("op", value)

    def slice(self, span: Span) -> str:
        return ast.slice_span(self.text, span)

    # ---- unit / declarations --------------------------------------------

    def parse_unit(self) -> ast.SourceUnit:
        classes = []
        while not self.at("eof"):
            classes.append(self.parse_class())
        return ast.SourceUnit(self.path, self.text, tuple(classes))

    def parse_class(self) -> ast.ClassDecl:
        start = self.expect("ident", "class")
        name = self.expect("ident")
        self.expect_op("{")
        fields: list[ast.FieldDecl] = []
        methods: list[ast.MethodDecl] = []
        invariants: list[ast.SpecClause] = []
        pending_contract: Optional[ast.Contract] = None
        while not self.at_op("}"):
            if self.at("eof"):
                raise ParseError(start.span, "unterminated class body")
            if self.peek().in_spec:
                if self.peek().value == "invariant":
                    invariants.append(self.parse_invariant_clause())
                    continue
                if pending_contract is not None:
                    raise ParseError(self.peek().span, "only one contract per method")
                pending_contract = self.parse_contract()
                continue
            decl = self.parse_member(pending_contract or ast.Contract())
            if isinstance(decl, ast.MethodDecl):
                methods.append(decl)
                pending_contract = None
            else:
                if pending_contract is not None:
                    raise ParseError(decl[0].span, "contract must precede a method")
                fields.extend(decl)
        end = self.expect_op("}")
        return ast.ClassDecl(
            name.value, tuple(fields), tuple(methods), tuple(invariants),
            start.span.cover(end.span),
        )

    def parse_invariant_clause(self) -> ast.SpecClause:
        self.expect("ident", "invariant")
        expr = self.parse_clause_expr()
        self.expect_op(";")
        return ast.SpecClause("invariant", expr.span, self.slice(expr.span), expr=expr)

    def parse_contract(self) -> ast.Contract:
        # optional visibility + behavior header
        while self.peek().in_spec and self.peek().value in _MODIFIERS:
            self.next()
        if self.peek().in_spec and self.peek().value == "normal_behavior":
            self.next()
        requires, ensures, assignable = [], [], []
        measured = None
        while self.peek().in_spec and self.peek().value in _CONTRACT_CLAUSES:
            kw = self.next()
            if kw.value == "assignable":
                locs, span = self.parse_locations()
                assignable.append(
                    ast.SpecClause("assignable", span, self.slice(span), locations=locs)
                )
            else:
                expr = self.parse_clause_expr()
                self.expect_op(";")
                clause = ast.SpecClause(kw.value, expr.span, self.slice(expr.span), expr=expr)
                if kw.value == "requires":
                    requires.append(clause)
                elif kw.value == "ensures":
                    ensures.append(clause)
                else:
                    if measured is not None:
                        raise ParseError(kw.span, "duplicate measured_by clause")
                    measured = clause
        if not (requires or ensures or assignable or measured):
            raise ParseError(self.peek().span, "empty contract annotation")
        return ast.Contract(tuple(requires), tuple(ensures), tuple(assignable), measured)

    def parse_clause_expr(self) -> ast.Expr:
        if self.at_op(";"):
            raise ParseError(self.peek().span, "empty clause expression")
        return self.parse_expr()

    def parse_locations(self) -> tuple[tuple[ast.LocExpr, ...], Span]:
        locs = [self.parse_location()]
        while self.at_op(","):
            self.next()
            locs.append(self.parse_location())
        end = self.expect_op(";")
        span = locs[0].span.cover(locs[-1].span)
        return tuple(locs), span

    def parse_location(self) -> ast.LocExpr:
        t = self.peek()
        if self.at_op("\\nothing"):
            self.next()
            return ast.LocNothing(t.span)
        if self.at_op("\\everything"):
            self.next()
            return ast.LocEverything(t.span)
        # prefix: `this` or identifier, followed by field selections only
        if self.at("ident", "this"):
            tok = self.next()
            expr: ast.Expr = ast.ThisRef(tok.span)
        else:
            tok = self.expect("ident")
            expr = ast.Name(tok.span, tok.value)
        while self.at_op("."):
            self.next()
            name = self.expect("ident")
            expr = ast.FieldAccess(expr.span.cover(name.span), expr, name.value)
        span = expr.span
        if self.at_op("["):
            self.next()
            if self.at_op("*"):
                self.next()
                end = self.expect_op("]")
                return ast.LocArrayAll(span.cover(end.span), expr)
            lo = self.parse_expr()
            if self.at_op(".."):
                self.next()
                hi = self.parse_expr()
                end = self.expect_op("]")
                return ast.LocArrayRange(span.cover(end.span), expr, lo, hi)
            end = self.expect_op("]")
            return ast.LocArrayIndex(span.cover(end.span), expr, lo)
        if isinstance(expr, ast.FieldAccess):
            return ast.LocField(expr.span, expr.receiver, expr.field)
        if isinstance(expr, ast.Name):
            return ast.LocField(expr.span, None, expr.ident)
        if isinstance(expr, ast.ArrayAccess):
            return ast.LocArrayIndex(expr.span, expr.array, expr.index)
        raise ParseError(expr.span, "not a location expression")

    def parse_member(self, contract: ast.Contract):
        start = self.peek()
        is_static = False
        while self.at("ident") and self.peek().value in _MODIFIERS:
            if self.peek().value == "static":
                is_static = True
            self.next()
        typ = self.parse_type()
        name = self.expect("ident")
        if self.at_op("("):
            return self.parse_method(start, typ, name, is_static, contract)
        # field declaration, possibly multiple declarators
        fields = [ast.FieldDecl(name.value, typ, start.span.cover(name.span))]
        while self.at_op(","):
            self.next()
            n2 = self.expect("ident")
            fields.append(ast.FieldDecl(n2.value, typ, n2.span))
        self.expect_op(";")
        return fields

    def parse_type(self) -> ast.TypeRef:
        t = self.expect("ident")
        if t.value == "int":
            if self.at_op("[") and self.at_op("]", 1):
                self.next()
                self.next()
                return ast.TypeRef(ast.Type.INT_ARRAY)
            return ast.TypeRef(ast.Type.INT)
        if t.value == "boolean":
            return ast.TypeRef(ast.Type.BOOLEAN)
        if t.value == "void":
            return ast.TypeRef(ast.Type.VOID)
        return ast.TypeRef(ast.Type.OBJECT, t.value)

    def parse_method(self, start, typ, name, is_static, contract) -> ast.MethodDecl:
        self.expect_op("(")
        params = []
        while not self.at_op(")"):
            pt = self.parse_type()
            pn = self.expect("ident")
            params.append(ast.Param(pn.value, pt, pn.span))
            if not self.at_op(")"):
                self.expect_op(",")
        self.expect_op(")")
        header_line = start.span.start_line
        body, end_span = self.parse_block_stmts()
        return ast.MethodDecl(
            name.value, tuple(params), typ, body, contract, is_static,
            start.span.cover(end_span), header_line,
        )

    # ---- statements ------------------------------------------------------

    def parse_block_stmts(self) -> tuple[tuple[ast.Stmt, ...], Span]:
        open_tok = self.expect_op("{")
        stmts: list[ast.Stmt] = []
        pending_loop_spec: Optional[ast.LoopSpec] = None
        while not self.at_op("}"):
            if self.at("eof"):
                raise ParseError(open_tok.span, "unterminated block")
            if self.peek().in_spec and self.peek().value in _LOOP_CLAUSES | {"assignable"}:
                if pending_loop_spec is not None:
                    raise ParseError(self.peek().span, "duplicate loop specification")
                pending_loop_spec = self.parse_loop_spec()
                continue
            stmt = self.parse_stmt(pending_loop_spec)
            if isinstance(stmt, ast.While) or (
                isinstance(stmt, ast.Labeled) and isinstance(stmt.stmt, ast.While)
            ):
                pending_loop_spec = None
            elif pending_loop_spec is not None:
                raise ParseError(stmt.span, "loop specification must precede a while loop")
            stmts.append(stmt)
        end = self.expect_op("}")
        return tuple(stmts), open_tok.span.cover(end.span)

    def parse_loop_spec(self) -> ast.LoopSpec:
        invariants, assignable = [], []
        decreases = None
        while self.peek().in_spec and self.peek().value in _LOOP_CLAUSES | {"assignable"}:
            kw = self.next()
            if kw.value == "assignable":
                locs, span = self.parse_locations()
                assignable.append(
                    ast.SpecClause("assignable", span, self.slice(span), locations=locs)
                )
            else:
                expr = self.parse_clause_expr()
                self.expect_op(";")
                clause = ast.SpecClause(
                    "loop_invariant" if kw.value == "loop_invariant" else "decreases",
                    expr.span, self.slice(expr.span), expr=expr,
                )
                if kw.value == "loop_invariant":
                    invariants.append(clause)
                else:
                    if decreases is not None:
                        raise ParseError(kw.span, "duplicate decreases clause")
                    decreases = clause
        return ast.LoopSpec(tuple(invariants), tuple(assignable), decreases)

    def parse_stmt(self, pending_loop_spec: Optional[ast.LoopSpec] = None) -> ast.Stmt:
        t = self.peek()
        if t.in_spec:
            if t.value in ("assert", "assume"):
                return self.parse_assertion()
            raise ParseError(t.span, f"unexpected specification keyword {t.value!r}")
        if self.at_op("{"):
            stmts, span = self.parse_block_stmts()
            return ast.Block(span, stmts)
        if self.at("ident", "if"):
            return self.parse_if()
        if self.at("ident", "while"):
            return self.parse_while(pending_loop_spec)
        if self.at("ident", "return"):
            start = self.next()
            value = None
            if not self.at_op(";"):
                value = self.parse_expr()
            end = self.expect_op(";")
            return ast.Return(start.span.cover(end.span), value)
        # label?
        if self.at("ident") and self.at_op(":", 1) and t.value not in _TYPE_KEYWORDS:
            label = self.next()
            self.next()  # ':'
            inner = self.parse_stmt(pending_loop_spec)
            return ast.Labeled(label.span.cover(inner.span), label.value, inner)
        # local declaration?
        if self.at("ident") and t.value in _TYPE_KEYWORDS:
            return self.parse_local_decl()
        if (
            self.at("ident")
            and self.at("ident", off=1)
            and (self.at_op(";", 2) or self.at_op("=", 2))
        ):
            return self.parse_local_decl()  # class-typed local
        if self.at_op("++") or self.at_op("--"):
            op = self.next()
            target = self.parse_postfix()
            end = self.expect_op(";")
            return ast.Increment(op.span.cover(end.span), target, 1 if op.value == "++" else -1)
        return self.parse_assign_or_call()

    def parse_assertion(self) -> ast.Stmt:
        kw = self.next()
        expr = self.parse_clause_expr()
        raw = self.slice(expr.span)
        if kw.value == "assume":
            end = self.expect_op(";")
            return ast.Assume(kw.span.cover(end.span), expr, raw)
        by_script = None
        by_span = None
        if self.at("script"):
            s = self.next()
            by_script = s.value
            by_span = s.span
        end_span = by_span or expr.span
        if self.at_op(";"):
            end_span = self.next().span
        elif by_script is None:
            raise ParseError(self.peek().span, "expected ';'")
        return ast.Assert(kw.span.cover(end_span), expr, raw, by_script, by_span)

    def parse_if(self) -> ast.IfElse:
        start = self.expect("ident", "if")
        self.expect_op("(")
        cond = self.parse_expr()
        self.expect_op(")")
        then_body = self.parse_stmt()
        else_body = None
        span = start.span.cover(then_body.span)
        if self.at("ident", "else"):
            self.next()
            else_body = self.parse_stmt()
            span = start.span.cover(else_body.span)
        return ast.IfElse(span, cond, then_body, else_body)

    def parse_while(self, spec: Optional[ast.LoopSpec]) -> ast.While:
        start = self.expect("ident", "while")
        self.expect_op("(")
        cond = self.parse_expr()
        self.expect_op(")")
        body = self.parse_stmt()
        return ast.While(start.span.cover(body.span), cond, body, spec)

    def parse_local_decl(self) -> ast.LocalDecl:
        start = self.peek()
        typ = self.parse_type()
        name = self.expect("ident")
        init = None
        if self.at_op("="):
            self.next()
            init = self.parse_expr()
        end = self.expect_op(";")
        return ast.LocalDecl(start.span.cover(end.span), typ, name.value, init)

    def parse_assign_or_call(self) -> ast.Stmt:
        start = self.peek()
        target = self.parse_postfix()
        if self.at_op("(") and isinstance(target, (ast.Name, ast.FieldAccess)):
            call = self.finish_call(target)
            end = self.expect_op(";")
            return ast.Call(
                start.span.cover(end.span), None, call[0], call[1], call[2], call[3]
            )
        if self.at_op("++") or self.at_op("--"):
            op = self.next()
            end = self.expect_op(";")
            return ast.Increment(
                start.span.cover(end.span), target, 1 if op.value == "++" else -1
            )
        self.expect_op("=")
        # right-hand side may be a method call (handled as a Call statement)
        save = self.i
        try:
            value = self.parse_expr()
        except ParseError:
            self.i = save
            value = None
        if value is not None and self.at_op(";"):
            end = self.next()
            return ast.Assign(start.span.cover(end.span), target, value)
        self.i = save
        callee = self.parse_postfix()
        if not self.at_op("(") or not isinstance(callee, (ast.Name, ast.FieldAccess)):
            raise ParseError(self.peek().span, "expected expression or call")
        recv, meth, args, call_span = self.finish_call(callee)
        end = self.expect_op(";")
        return ast.Call(start.span.cover(end.span), target, recv, meth, args, call_span)

    def finish_call(self, callee) -> tuple[Optional[ast.Expr], str, tuple[ast.Expr, ...], Span]:
        if isinstance(callee, ast.Name):
            recv, meth = None, callee.ident
        else:
            recv, meth = callee.receiver, callee.field
        self.expect_op("(")
        args = []
        while not self.at_op(")"):
            args.append(self.parse_expr())
            if not self.at_op(")"):
                self.expect_op(",")
        end = self.expect_op(")")
        return recv, meth, tuple(args), callee.span.cover(end.span)

    # ---- expressions -----------------------------------------------------

    def parse_expr(self) -> ast.Expr:
        return self.parse_implication()

    def parse_implication(self) -> ast.Expr:
        left = self.parse_or()
        if self.at_op("==>"):
            t = self.next()
            self.require_spec(t)
            right = self.parse_implication()  # right-associative
            return ast.Binary(left.span.cover(right.span), "==>", left, right)
        return left

    def parse_or(self) -> ast.Expr:
        left = self.parse_and()
        while self.at_op("||"):
            self.next()
            right = self.parse_and()
            left = ast.Binary(left.span.cover(right.span), "||", left, right)
        return left

    def parse_and(self) -> ast.Expr:
        left = self.parse_equality()
        while self.at_op("&&"):
            self.next()
            right = self.parse_equality()
            left = ast.Binary(left.span.cover(right.span), "&&", left, right)
        return left

    def parse_equality(self) -> ast.Expr:
        left = self.parse_relational()
        while self.at_op("==") or self.at_op("!="):
            op = self.next()
            right = self.parse_relational()
            left = ast.Binary(left.span.cover(right.span), op.value, left, right)
        return left

    def parse_relational(self) -> ast.Expr:
        operands = [self.parse_additive()]
        ops = []
        while self.at_op("<") or self.at_op("<=") or self.at_op(">") or self.at_op(">="):
            # `\old<line>` handled in parse_primary, never reaches here
            op = self.next()
            ops.append(op.value)
            operands.append(self.parse_additive())
            if len(ops) >= 2:
                self.require_spec(op)
        if not ops:
            return operands[0]
        if len(ops) == 1:
            return ast.Binary(
                operands[0].span.cover(operands[1].span), ops[0], operands[0], operands[1]
            )
        dirs = {o.lstrip("=")[0] for o in ops}
        if dirs not in ({"<"}, {">"}):
            raise ParseError(operands[0].span, "chained comparison must not mix directions")
        span = operands[0].span.cover(operands[-1].span)
        if "<" in dirs:
            return ast.Chain(span, tuple(operands), tuple(ops))
        # normalize a >= b > c to chained less-than form c < b <= a
        flipped = tuple("<" if o == ">" else "<=" for o in reversed(ops))
        return ast.Chain(span, tuple(reversed(operands)), flipped)

    def parse_additive(self) -> ast.Expr:
        left = self.parse_multiplicative()
        while self.at_op("+") or self.at_op("-"):
            op = self.next()
            right = self.parse_multiplicative()
            left = ast.Binary(left.span.cover(right.span), op.value, left, right)
        return left

    def parse_multiplicative(self) -> ast.Expr:
        left = self.parse_unary()
        while self.at_op("*") or self.at_op("/") or self.at_op("%"):
            op = self.next()
            right = self.parse_unary()
            left = ast.Binary(left.span.cover(right.span), op.value, left, right)
        return left

    def parse_unary(self) -> ast.Expr:
        if self.at_op("-") or self.at_op("!"):
            op = self.next()
            operand = self.parse_unary()
            return ast.Unary(op.span.cover(operand.span), op.value, operand)
        return self.parse_postfix()

    def parse_postfix(self) -> ast.Expr:
        expr = self.parse_primary()
        while True:
            if self.at_op("."):
                self.next()
                name = self.expect("ident")
                span = expr.span.cover(name.span)
                if name.value == "length":
                    expr = ast.ArrayLength(span, expr)
                else:
                    expr = ast.FieldAccess(span, expr, name.value)
            elif self.at_op("["):
                self.next()
                idx = self.parse_expr()
                end = self.expect_op("]")
                expr = ast.ArrayAccess(expr.span.cover(end.span), expr, idx)
            else:
                return expr

    def require_spec(self, tok: Token):
        if not tok.in_spec:
            raise ParseError(tok.span, f"{tok.value!r} is only allowed in annotations")

    def parse_primary(self) -> ast.Expr:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return ast.IntLit(t.span, int(t.value))
        if self.at("ident", "true") or self.at("ident", "false"):
            self.next()
            return ast.BoolLit(t.span, t.value == "true")
        if self.at("ident", "null"):
            self.next()
            return ast.NullLit(t.span)
        if self.at("ident", "this"):
            self.next()
            return ast.ThisRef(t.span)
        if self.at_op("\\result"):
            self.require_spec(t)
            self.next()
            return ast.ResultRef(t.span)
        if self.at_op("\\old"):
            self.require_spec(t)
            return self.parse_old()
        if self.at_op("\\invariant_for"):
            self.require_spec(t)
            self.next()
            self.expect_op("(")
            arg = self.parse_expr()
            end = self.expect_op(")")
            return ast.InvariantFor(t.span.cover(end.span), arg)
        if self.at_op("\\forall") or self.at_op("\\exists"):
            raise ParseError(t.span, "quantifier must be parenthesized")
        if self.at_op("("):
            open_tok = self.next()
            if self.at_op("\\forall") or self.at_op("\\exists"):
                return self.parse_quantifier(open_tok)
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        if t.kind == "ident":
            self.next()
            return ast.Name(t.span, t.value)
        raise ParseError(t.span, f"unexpected token {t.value or t.kind!r}")

    def parse_old(self) -> ast.Expr:
        start = self.next()
        if self.at_op("<"):
            self.next()
            line = self.expect("int")
            self.expect_op(">")
            self.expect_op("(")
            operand = self.parse_expr()
            end = self.expect_op(")")
            return ast.Old(start.span.cover(end.span), operand, at_line=int(line.value))
        self.expect_op("(")
        operand = self.parse_expr()
        label = None
        if self.at_op(","):
            self.next()
            label = self.expect("ident").value
        end = self.expect_op(")")
        return ast.Old(start.span.cover(end.span), operand, label=label)

    def parse_quantifier(self, open_tok: Token) -> ast.Expr:
        kw = self.next()
        self.require_spec(kw)
        kind = "forall" if kw.value == "\\forall" else "exists"
        var_type = self.parse_type()
        var_name = self.expect("ident").value
        self.expect_op(";")
        first = self.parse_expr()
        rng = None
        body = first
        if self.at_op(";"):
            self.next()
            rng = first
            body = self.parse_expr()
        end = self.expect_op(")")
        return ast.Quantifier(
            open_tok.span.cover(end.span), kind, var_type, var_name, rng, body
        )


def parse_unit(text: str, path: str) -> Union[ast.SourceUnit, list[Diagnostic]]:
    """Parse a compilation unit; returns the unit or a list of diagnostics."""
    try:
        tokens = tokenize(text, path)
        return Parser(tokens, text, path).parse_unit()
    except LexError as e:
        return [Diagnostic(e.span, e.message)]
    except ParseError as e:
        return [e.diagnostic]


def parse_spec_expr(text: str, path: str = "<input>") -> Union[ast.Expr, list[Diagnostic]]:
    """Parse a standalone specification expression (cut formulas, script args)."""
    try:
        tokens = [
            Token(t.kind, t.value, t.span, True) for t in tokenize(text, path)
        ]
        p = Parser(tokens, text, path)
        expr = p.parse_expr()
        if not p.at("eof"):
            return [Diagnostic(p.peek().span, "trailing input after expression")]
        return expr
    except LexError as e:
        return [Diagnostic(e.span, e.message)]
    except ParseError as e:
        return [e.diagnostic]
