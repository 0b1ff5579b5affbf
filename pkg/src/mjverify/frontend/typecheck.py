"""Name resolution and type checking, plus the statement shape rules.

check_shape enforces the two layout rules the goal renderer depends on:
at most one statement per source line, and `return x;` only with a variable
or literal (nothing can be rendered after a return otherwise).
"""

from __future__ import annotations

from typing import Optional

from . import ast
from .ast import Diagnostic, Type, TypeRef

INT = TypeRef(Type.INT)
BOOLEAN = TypeRef(Type.BOOLEAN)
INT_ARRAY = TypeRef(Type.INT_ARRAY)
VOID = TypeRef(Type.VOID)


def check_shape(unit: ast.SourceUnit) -> list[Diagnostic]:
    """Layout diagnostics; accepts well-shaped input unchanged."""
    diags: list[Diagnostic] = []
    for cls in unit.classes:
        for method in cls.methods:
            lines: dict[int, ast.Stmt] = {}

            def visit(stmt: ast.Stmt):
                if isinstance(stmt, ast.Block):
                    for s in stmt.stmts:
                        visit(s)
                    return
                if isinstance(stmt, ast.Labeled):
                    visit(stmt.stmt)
                    return
                line = stmt.span.start_line
                if line in lines:
                    diags.append(
                        Diagnostic(stmt.span, "more than one statement on this line")
                    )
                else:
                    lines[line] = stmt
                if isinstance(stmt, ast.IfElse):
                    visit(stmt.then_body)
                    if stmt.else_body:
                        visit(stmt.else_body)
                elif isinstance(stmt, ast.While):
                    visit(stmt.body)
                elif isinstance(stmt, ast.Return):
                    if stmt.value is not None and not isinstance(
                        stmt.value, (ast.Name, ast.IntLit, ast.BoolLit, ast.NullLit)
                    ):
                        diags.append(
                            Diagnostic(
                                stmt.span,
                                "return statements must return a variable or literal",
                            )
                        )

            for s in method.body:
                visit(s)
    return diags


class _Env:
    def __init__(self, cls: ast.ClassDecl, method: Optional[ast.MethodDecl], unit: ast.SourceUnit):
        self.unit = unit
        self.cls = cls
        self.method = method
        self.locals: list[dict[str, TypeRef]] = [{}]
        self.bound: list[tuple[str, TypeRef]] = []

    def push(self):
        self.locals.append({})

    def pop(self):
        self.locals.pop()

    def declare(self, name: str, typ: TypeRef) -> bool:
        if any(name in scope for scope in self.locals) or (
            self.method and any(p.name == name for p in self.method.params)
        ):
            return False
        self.locals[-1][name] = typ
        return True

    def lookup(self, name: str) -> Optional[tuple[str, TypeRef]]:
        for name2, typ in reversed(self.bound):
            if name2 == name:
                return "bound", typ
        for scope in reversed(self.locals):
            if name in scope:
                return "local", scope[name]
        if self.method:
            for p in self.method.params:
                if p.name == name:
                    return "param", p.type
        f = self.cls.field(name)
        if f is not None:
            return "field", f.type
        return None


class TypeChecker:
    def __init__(self, unit: ast.SourceUnit):
        self.unit = unit
        self.diags: list[Diagnostic] = []

    def error(self, span: ast.Span, msg: str):
        self.diags.append(Diagnostic(span, msg))

    def run(self) -> list[Diagnostic]:
        seen_classes = set()
        for cls in self.unit.classes:
            if cls.name in seen_classes:
                self.error(cls.span, f"duplicate class {cls.name!r}")
            seen_classes.add(cls.name)
        for cls in self.unit.classes:
            self.check_class(cls)
        return self.diags

    def check_class(self, cls: ast.ClassDecl):
        seen = set()
        for f in cls.fields:
            if f.name in seen:
                self.error(f.span, f"duplicate field {f.name!r}")
            seen.add(f.name)
            if f.type.kind is Type.OBJECT and not self.unit.find_class(f.type.class_name):
                self.error(f.span, f"unknown class {f.type.class_name!r}")
        seen_m = set()
        for m in cls.methods:
            if m.name in seen_m:
                self.error(m.span, f"duplicate method {m.name!r}")
            seen_m.add(m.name)
        for inv in cls.invariants:
            env = _Env(cls, None, self.unit)
            self.check_expr(inv.expr, env, spec=True, expect=BOOLEAN)
        for m in cls.methods:
            self.check_method(cls, m)

    def check_method(self, cls: ast.ClassDecl, method: ast.MethodDecl):
        env = _Env(cls, method, self.unit)
        seen = set()
        for p in method.params:
            if p.name in seen:
                self.error(p.span, f"duplicate parameter {p.name!r}")
            seen.add(p.name)
        labels = method.labels()
        for c in method.contract.requires:
            self.check_expr(c.expr, env, spec=True, expect=BOOLEAN, labels=labels)
        for c in method.contract.ensures:
            self.check_expr(
                c.expr, env, spec=True, expect=BOOLEAN, labels=labels, allow_result=True
            )
        for c in method.contract.assignable:
            self.check_locations(c, env)
        if method.contract.measured_by:
            self.check_expr(method.contract.measured_by.expr, env, spec=True, expect=INT)
        for s in method.body:
            self.check_stmt(s, env, labels)

    def check_stmt(self, stmt: ast.Stmt, env: _Env, labels):
        if isinstance(stmt, ast.Block):
            env.push()
            for s in stmt.stmts:
                self.check_stmt(s, env, labels)
            env.pop()
        elif isinstance(stmt, ast.Labeled):
            self.check_stmt(stmt.stmt, env, labels)
        elif isinstance(stmt, ast.LocalDecl):
            if stmt.init is not None:
                self.check_expr(stmt.init, env, spec=False, expect=stmt.type)
            if stmt.type.kind in (Type.VOID,):
                self.error(stmt.span, "local variable cannot be void")
            if stmt.type.kind is Type.OBJECT and not self.unit.find_class(stmt.type.class_name):
                self.error(stmt.span, f"unknown class {stmt.type.class_name!r}")
            if not env.declare(stmt.name, stmt.type):
                self.error(stmt.span, f"redeclaration of {stmt.name!r}")
        elif isinstance(stmt, ast.Assign):
            target_t = self.check_lvalue(stmt.target, env)
            if target_t is not None:
                self.check_expr(stmt.value, env, spec=False, expect=target_t)
        elif isinstance(stmt, ast.Increment):
            t = self.check_lvalue(stmt.target, env)
            if t is not None and t != INT:
                self.error(stmt.span, "increment target must be int")
        elif isinstance(stmt, ast.IfElse):
            self.check_expr(stmt.cond, env, spec=False, expect=BOOLEAN)
            self.check_stmt(stmt.then_body, env, labels)
            if stmt.else_body:
                self.check_stmt(stmt.else_body, env, labels)
        elif isinstance(stmt, ast.While):
            self.check_expr(stmt.cond, env, spec=False, expect=BOOLEAN)
            if stmt.spec:
                for inv in stmt.spec.invariants:
                    self.check_expr(inv.expr, env, spec=True, expect=BOOLEAN, labels=labels)
                for c in stmt.spec.assignable:
                    self.check_locations(c, env)
                if stmt.spec.decreases:
                    self.check_expr(stmt.spec.decreases.expr, env, spec=True, expect=INT)
            self.check_stmt(stmt.body, env, labels)
        elif isinstance(stmt, ast.Call):
            self.check_call(stmt, env)
        elif isinstance(stmt, ast.Return):
            want = env.method.return_type
            if stmt.value is None:
                if want != VOID:
                    self.error(stmt.span, "missing return value")
            else:
                if want == VOID:
                    self.error(stmt.span, "void method returns a value")
                else:
                    self.check_expr(stmt.value, env, spec=False, expect=want)
        elif isinstance(stmt, (ast.Assert, ast.Assume)):
            self.check_expr(stmt.expr, env, spec=True, expect=BOOLEAN, labels=labels)
        else:
            self.error(stmt.span, f"unsupported statement {type(stmt).__name__}")

    def check_call(self, stmt: ast.Call, env: _Env):
        cls = env.cls
        if stmt.receiver is not None:
            rt = self.check_expr(stmt.receiver, env, spec=False)
            if rt is None:
                return
            if rt.kind is not Type.OBJECT:
                self.error(stmt.receiver.span, "receiver is not an object")
                return
            cls = self.unit.find_class(rt.class_name)
            if cls is None:
                return
        callee = cls.method(stmt.method)
        if callee is None:
            self.error(stmt.call_span, f"unknown method {stmt.method!r}")
            return
        if len(stmt.args) != len(callee.params):
            self.error(stmt.call_span, f"{stmt.method!r} expects {len(callee.params)} arguments")
            return
        for arg, p in zip(stmt.args, callee.params):
            self.check_expr(arg, env, spec=False, expect=p.type)
        if stmt.result is not None:
            t = self.check_lvalue(stmt.result, env)
            if callee.return_type == VOID:
                self.error(stmt.call_span, f"{stmt.method!r} returns no value")
            elif t is not None and t != callee.return_type:
                self.error(stmt.call_span, "call result type mismatch")

    def check_lvalue(self, target: ast.Expr, env: _Env) -> Optional[TypeRef]:
        if isinstance(target, ast.Name):
            r = env.lookup(target.ident)
            if r is None:
                self.error(target.span, f"unknown variable {target.ident!r}")
                return None
            if r[0] == "bound":
                self.error(target.span, "cannot assign to a bound variable")
                return None
            return r[1]
        if isinstance(target, (ast.FieldAccess, ast.ArrayAccess)):
            return self.check_expr(target, env, spec=False)
        self.error(target.span, "not an assignable location")
        return None

    def check_locations(self, clause: ast.SpecClause, env: _Env):
        for loc in clause.locations:
            if isinstance(loc, (ast.LocNothing, ast.LocEverything)):
                continue
            if isinstance(loc, ast.LocField):
                recv_cls = env.cls
                if loc.receiver is not None:
                    rt = self.check_expr(loc.receiver, env, spec=True)
                    if rt is None:
                        continue
                    if rt.kind is not Type.OBJECT:
                        self.error(loc.span, "field location receiver is not an object")
                        continue
                    recv_cls = self.unit.find_class(rt.class_name)
                if recv_cls and recv_cls.field(loc.field) is None:
                    r = env.lookup(loc.field)
                    if r is None or r[0] != "field":
                        self.error(loc.span, f"unknown field {loc.field!r}")
            elif isinstance(loc, (ast.LocArrayAll, ast.LocArrayRange, ast.LocArrayIndex)):
                self.check_expr(loc.array, env, spec=True, expect=INT_ARRAY)
                if isinstance(loc, ast.LocArrayRange):
                    self.check_expr(loc.lo, env, spec=True, expect=INT)
                    self.check_expr(loc.hi, env, spec=True, expect=INT)
                elif isinstance(loc, ast.LocArrayIndex):
                    self.check_expr(loc.index, env, spec=True, expect=INT)

    def check_expr(
        self,
        expr: ast.Expr,
        env: _Env,
        spec: bool,
        expect: Optional[TypeRef] = None,
        labels=None,
        allow_result: bool = False,
    ) -> Optional[TypeRef]:
        t = self.infer(expr, env, spec, labels or {}, allow_result)
        if t is not None and expect is not None and t != expect:
            self.error(expr.span, f"expected {expect}, found {t}")
        return t

    def infer(self, expr, env, spec, labels, allow_result) -> Optional[TypeRef]:
        e = expr
        if isinstance(e, ast.IntLit):
            return INT
        if isinstance(e, ast.BoolLit):
            return BOOLEAN
        if isinstance(e, ast.NullLit):
            return TypeRef(Type.OBJECT, None)
        if isinstance(e, ast.ThisRef):
            if env.method is not None and env.method.is_static:
                self.error(e.span, "'this' in static method")
                return None
            return TypeRef(Type.OBJECT, env.cls.name)
        if isinstance(e, ast.ResultRef):
            if not allow_result or env.method is None:
                self.error(e.span, "\\result only allowed in ensures clauses")
                return None
            if env.method.return_type == VOID:
                self.error(e.span, "\\result in void method")
                return None
            return env.method.return_type
        if isinstance(e, ast.Name):
            r = env.lookup(e.ident)
            if r is None:
                self.error(e.span, f"unknown name {e.ident!r}")
                return None
            if r[0] == "field" and env.method is not None and env.method.is_static:
                self.error(e.span, f"instance field {e.ident!r} in static method")
            return r[1]
        if isinstance(e, ast.FieldAccess):
            if e.receiver is None:
                cls = env.cls
            else:
                rt = self.infer(e.receiver, env, spec, labels, allow_result)
                if rt is None:
                    return None
                if rt.kind is not Type.OBJECT or rt.class_name is None:
                    self.error(e.span, "field access on non-object")
                    return None
                cls = self.unit.find_class(rt.class_name)
                if cls is None:
                    self.error(e.span, f"unknown class {rt.class_name!r}")
                    return None
            f = cls.field(e.field)
            if f is None:
                self.error(e.span, f"unknown field {e.field!r}")
                return None
            return f.type
        if isinstance(e, ast.ArrayAccess):
            self.check_expr(e.array, env, spec, INT_ARRAY, labels, allow_result)
            self.check_expr(e.index, env, spec, INT, labels, allow_result)
            return INT
        if isinstance(e, ast.ArrayLength):
            self.check_expr(e.array, env, spec, INT_ARRAY, labels, allow_result)
            return INT
        if isinstance(e, ast.Unary):
            want = INT if e.op == "-" else BOOLEAN
            self.check_expr(e.operand, env, spec, want, labels, allow_result)
            return want
        if isinstance(e, ast.Binary):
            if e.op in ("+", "-", "*", "/", "%"):
                self.check_expr(e.left, env, spec, INT, labels, allow_result)
                self.check_expr(e.right, env, spec, INT, labels, allow_result)
                return INT
            if e.op in ("<", "<=", ">", ">="):
                self.check_expr(e.left, env, spec, INT, labels, allow_result)
                self.check_expr(e.right, env, spec, INT, labels, allow_result)
                return BOOLEAN
            if e.op in ("==", "!="):
                lt = self.infer(e.left, env, spec, labels, allow_result)
                rt = self.infer(e.right, env, spec, labels, allow_result)
                if lt and rt and lt != rt:
                    nullish = TypeRef(Type.OBJECT, None)
                    obj_cmp = {lt.kind, rt.kind} <= {Type.OBJECT, Type.INT_ARRAY}
                    if not (obj_cmp and (lt == nullish or rt == nullish)):
                        self.error(e.span, f"cannot compare {lt} and {rt}")
                return BOOLEAN
            if e.op in ("&&", "||", "==>"):
                self.check_expr(e.left, env, spec, BOOLEAN, labels, allow_result)
                self.check_expr(e.right, env, spec, BOOLEAN, labels, allow_result)
                return BOOLEAN
            self.error(e.span, f"unknown operator {e.op!r}")
            return None
        if isinstance(e, ast.Chain):
            for part in e.operands:
                self.check_expr(part, env, spec, INT, labels, allow_result)
            return BOOLEAN
        if isinstance(e, ast.Quantifier):
            if e.var_type not in (INT,):
                self.error(e.span, "only int quantifier variables are supported")
            env.bound.append((e.var_name, e.var_type))
            if e.range is not None:
                self.check_expr(e.range, env, spec, BOOLEAN, labels, allow_result)
            self.check_expr(e.body, env, spec, BOOLEAN, labels, allow_result)
            env.bound.pop()
            return BOOLEAN
        if isinstance(e, ast.Old):
            if e.label is not None and e.label not in labels:
                self.error(e.span, f"unknown label {e.label!r}")
            return self.infer(e.operand, env, spec, labels, allow_result)
        if isinstance(e, ast.InvariantFor):
            t = self.infer(e.operand, env, spec, labels, allow_result)
            if t is not None and t.kind is not Type.OBJECT:
                self.error(e.span, "\\invariant_for expects an object")
            return BOOLEAN
        self.error(e.span, f"unsupported expression {type(e).__name__}")
        return None


def typecheck(unit: ast.SourceUnit) -> list[Diagnostic]:
    return TypeChecker(unit).run()
