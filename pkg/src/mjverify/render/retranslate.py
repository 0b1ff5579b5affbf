"""Back-translation of goal formulas into specification-language text.

A formula with a single-origin span whose original text still translates to
the very same term at its anchor state is shown verbatim, reverting every
normalization the logic performed.  Everything else is rebuilt structurally:
pull-out constants are inlined, polynomial normal forms are rendered back as
comparisons (with chains like `0 <= j < a.length` recovered), variable
copies are inverted through the anchor state or shown as `\\old<line>(x)`,
and subterms evaluated at earlier heaps become `\\old(...)` or
`\\old<line>(...)` references.  Formulas with no source-level counterpart
report an untranslatable status with a clear message instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend import ast, parse_spec_expr, span_text
from ..logic import (
    ADD, AND, ARR, EQ, FALSE, GT, IMP, IMOD, INTDIV, ITE, LENGTH, MUL, NOT,
    OR, SELECT, TRUE,
    EMPTY_UPDATE, OpKind, Operator, OriginRef, Term, Update, origin_of,
    poly_of, pv_term, term_key, term_to_str,
)
from ..pogen import ProofObligation
from ..translate import TEnv, TranslateError, translate
from .heapmap import HeapMap


class Untranslatable(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


@dataclass
class RenderCtx:
    po: ProofObligation
    info: object  # NodeInfo
    heapmap: HeapMap

    def steps(self):
        return self.info.path

    def state_at(self, gap: int) -> Update:
        steps = self.info.path
        if not steps:
            return EMPTY_UPDATE
        if gap < len(steps):
            return steps[gap].update_before
        return steps[-1].update_after

    def scope_names(self) -> list[str]:
        return sorted(self.info.scope)

    def value_of(self, name: str, gap: int) -> Term:
        op = self.info.scope[name]
        bound = self.state_at(gap).get(op)
        return bound if bound is not None else pv_term(op)

    def env_at(self, gap: int) -> TEnv:
        po = self.po
        return TEnv(
            unit=po.unit, cls=po.cls, method=po.method,
            values={n: pv_term(op) for n, op in self.info.scope.items()},
            var_types=dict(self.info.var_types),
            heap_term=pv_term(po.heap_var),
            self_term=pv_term(po.self_var) if po.self_var else None,
            old_heap=pv_term(po.prestate_heap_var),
            old_values={n: pv_term(op) for n, op in po.old_param_vars.items()},
            label_states=dict(self.info.label_states),
            line_states={s.line: s.update_before for s in self.info.path},
            state=self.state_at(gap),
        )


@dataclass
class Rendered:
    text: str
    state_refs: list[tuple[str, int]] = field(default_factory=list)


def inline_pullouts(t: Term, defs: dict[Operator, Term], depth: int = 0) -> Term:
    """Revert pull-out steps by substituting defining terms for constants."""
    if depth > 16 or not defs:
        return t
    changed = False
    out = t
    for const_op, definition in defs.items():
        const = Term(const_op, (), definition.sort)
        if out.contains(const):
            out = out.replace(const, definition)
            changed = True
    if changed:
        return inline_pullouts(out, defs, depth + 1)
    return out


def clean_clause_text(text: str) -> str:
    """Blank out annotation continuation markers, preserving offsets."""
    import re

    return re.sub(
        r"(\n[ \t]*)@", lambda m: m.group(1) + " ", text
    )


def try_parse_translate(text: str, ctx: RenderCtx, gap: int) -> Optional[Term]:
    parsed = parse_spec_expr(clean_clause_text(text), ctx.po.unit.path)
    if isinstance(parsed, list):
        return None
    try:
        return translate(parsed, ctx.env_at(gap))
    except (TranslateError, Exception):
        return None


# ---------------------------------------------------------------------------
# structural rendering
# ---------------------------------------------------------------------------

_PREC_IMP = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4
_PREC_CMP = 5


class _Renderer:
    def __init__(self, ctx: RenderCtx, gap: int):
        self.ctx = ctx
        self.gap = gap
        self.state_refs: list[tuple[str, int]] = []
        self.bound_names: set[str] = set()

    # -- helpers -----------------------------------------------------------

    def current_heap(self, gap: int) -> Term:
        h = self.ctx.state_at(gap).get(self.ctx.po.heap_var)
        return h if h is not None else pv_term(self.ctx.po.heap_var)

    def match_var(self, t: Term, gap: int) -> Optional[str]:
        """A scope variable whose value at the anchor state is exactly `t`."""
        if t.op.kind is OpKind.CONSTANT:
            return None
        for name in self.ctx.scope_names():
            if name in self.bound_names:
                continue
            if self.ctx.value_of(name, gap) == t:
                return name
        return None

    def gap_of_heap(self, heap: Term, gap: int) -> Optional[int]:
        """Largest gap not later than `gap` whose state carries this heap."""
        for g in range(min(gap, len(self.ctx.steps())), -1, -1):
            if self.current_heap(g) == heap:
                return g
        return None

    # -- formulas ------------------------------------------------------------

    def formula(self, t: Term, gap: int, outer: int = 0) -> str:
        if t == TRUE:
            return "true"
        if t == FALSE:
            return "false"
        if t.op == AND:
            chain = self.try_chain(t, gap)
            if chain is not None:
                return chain
            s = f"{self.formula(t.children[0], gap, _PREC_AND + 1)} && {self.formula(t.children[1], gap, _PREC_AND)}"
            return self._wrap(s, _PREC_AND, outer)
        if t.op == OR:
            s = f"{self.formula(t.children[0], gap, _PREC_OR + 1)} || {self.formula(t.children[1], gap, _PREC_OR)}"
            return self._wrap(s, _PREC_OR, outer)
        if t.op == IMP:
            s = f"{self.formula(t.children[0], gap, _PREC_IMP + 1)} ==> {self.formula(t.children[1], gap, _PREC_IMP)}"
            return self._wrap(s, _PREC_IMP, outer)
        if t.op == NOT:
            inner = t.children[0]
            if inner.op == EQ:
                l, r = self.eq_sides(inner, gap)
                return self._wrap(f"{l} != {r}", _PREC_CMP, outer)
            return f"!({self.formula(inner, gap)})"
        if t.op == GT:
            l, op, r = self.compare(t, gap)
            return self._wrap(f"{l} {op} {r}", _PREC_CMP, outer)
        if t.op == EQ:
            l, r = self.eq_sides(t, gap)
            return self._wrap(f"{l} == {r}", _PREC_CMP, outer)
        if t.op.kind is OpKind.QUANTIFIER:
            var: Operator = t.op.payload
            if var.payload.kind != "int":
                raise Untranslatable(
                    "the formula quantifies over heap locations (fields), "
                    "which is not expressible at the specification level"
                )
            kw = "\\forall" if t.op.name == "forall" else "\\exists"
            body = t.children[0]
            self.bound_names.add(var.name)
            try:
                if t.op.name == "forall" and body.op == IMP:
                    rng = self.formula(body.children[0], gap)
                    inner = self.formula(body.children[1], gap)
                    return f"({kw} int {var.name}; {rng}; {inner})"
                if t.op.name == "exists" and body.op == AND:
                    rng = self.formula(body.children[0], gap)
                    inner = self.formula(body.children[1], gap)
                    return f"({kw} int {var.name}; {rng}; {inner})"
                return f"({kw} int {var.name}; {self.formula(body, gap)})"
            finally:
                self.bound_names.discard(var.name)
        if t.op == ITE:
            raise Untranslatable(
                "conditional terms from aliasing case distinctions have no "
                "specification-level form"
            )
        if t.op.name.startswith("inv_"):
            recv = self.term(t.children[1], gap)
            heap = t.children[0]
            if heap != self.current_heap(gap):
                raise Untranslatable(
                    "class invariant evaluated at another program state"
                )
            return f"\\invariant_for({recv})"
        if t.op.name in ("wellFormed", "inSet", "isArrIdx") or t.op.name.startswith(
            "exactInstance_"
        ):
            raise Untranslatable(
                f"internal predicate {t.op.name!r} has no specification-level form"
            )
        if t.op.kind is OpKind.BOUND_VAR or t.op.kind is OpKind.PROGRAM_VAR:
            return self.term(t, gap)
        raise Untranslatable(f"no specification-level form for {t.op.name!r}")

    def _wrap(self, s: str, prec: int, outer: int) -> str:
        return f"({s})" if prec < outer else s

    def try_chain(self, t: Term, gap: int) -> Optional[str]:
        """Render and(a REL b, b REL c) as the chained a REL b REL c."""
        a, b = t.children
        if a.op != GT or b.op != GT:
            return None
        try:
            l1, op1, r1 = self.compare(a, gap)
            l2, op2, r2 = self.compare(b, gap)
        except Untranslatable:
            return None
        if r1 == l2:
            return f"{l1} {op1} {l2} {op2} {r2}"
        if r2 == l1:
            return f"{l2} {op2} {l1} {op1} {r1}"
        return None

    # -- comparisons and integer terms ---------------------------------------

    def compare(self, t: Term, gap: int) -> tuple[str, str, str]:
        """Normalized `poly > c` back to `small REL large` form."""
        monos, k = poly_of(t.children[0])
        c = poly_of(t.children[1])[1] - k
        monos, delta = self.invert_copies(monos, gap)
        c -= delta
        pos = {m: v for m, v in monos.items() if v > 0}
        neg = {m: -v for m, v in monos.items() if v < 0}
        if c == -1:
            return self.poly_text(neg, 0, gap), "<=", self.poly_text(pos, 0, gap)
        if c == 0:
            return self.poly_text(neg, 0, gap), "<", self.poly_text(pos, 0, gap)
        if c > 0:
            return self.poly_text(neg, c, gap), "<", self.poly_text(pos, 0, gap)
        return self.poly_text(neg, 0, gap), "<=", self.poly_text(pos, -c - 1, gap)

    def eq_sides(self, t: Term, gap: int) -> tuple[str, str]:
        l, r = t.children
        if l.sort.kind == "int":
            return self.int_term(l, gap), self.int_term(r, gap)
        return self.term(l, gap), self.term(r, gap)

    def invert_copies(self, monos: dict, gap: int) -> tuple[dict, int]:
        """Replace copy variables expressible through a current variable.

        A copy `j_0` with current state `j = j_0 + k` becomes `j - k`,
        rewriting the polynomial in terms of the live variable; the returned
        delta is the constant shift this adds to the polynomial.
        """
        out = dict(monos)
        delta = 0
        for _ in range(4):
            target = None
            for mono in sorted(out, key=lambda m: tuple(k for k, _ in m)):
                for _, atom in mono:
                    if atom.op in self.ctx.heapmap.var_copies:
                        if self.match_var(atom, gap) is None:
                            target = atom
                            break
                if target is not None:
                    break
            if target is None:
                return out, delta
            base_op, _line = self.ctx.heapmap.var_copies[target.op]
            base_name = next(
                (n for n, op in self.ctx.info.scope.items() if op == base_op), None
            )
            if base_name is None:
                return out, delta
            vmonos, vconst = poly_of(self.ctx.value_of(base_name, gap))
            copy_key = ((term_key(target), target),)
            if set(vmonos) != {copy_key} or vmonos[copy_key] != 1:
                return out, delta
            # base = copy + vconst  =>  copy = base - vconst
            repl_monos = {((term_key(pv_term(base_op)), pv_term(base_op)),): 1}
            out, d = _poly_subst(out, target, repl_monos, -vconst)
            delta += d
        return out, delta

    def poly_text(self, monos: dict, const: int, gap: int) -> str:
        parts: list[tuple[int, str]] = []
        for mono in sorted(monos, key=lambda m: tuple(k for k, _ in m)):
            coeff = monos[mono]
            atoms = [self.int_atom(a, gap) for _, a in mono]
            body = " * ".join(atoms)
            parts.append((coeff, body))
        if not parts:
            return str(const)
        text = ""
        for i, (coeff, body) in enumerate(parts):
            mag = abs(coeff)
            piece = body if mag == 1 else f"{mag} * {body}"
            if i == 0:
                text = piece if coeff > 0 else f"-{piece}"
            else:
                text += f" + {piece}" if coeff > 0 else f" - {piece}"
        if const > 0:
            text += f" + {const}"
        elif const < 0:
            text += f" - {-const}"
        return text

    def int_term(self, t: Term, gap: int) -> str:
        monos, const = poly_of(t)
        monos, delta = self.invert_copies(monos, gap)
        return self.poly_text(monos, const + delta, gap)

    def scope_name_of(self, op: Operator) -> Optional[str]:
        for name, scoped in self.ctx.info.scope.items():
            if scoped == op and name not in self.bound_names:
                return name
        return None

    def int_atom(self, t: Term, gap: int) -> str:
        name = self.match_var(t, gap)
        if name is not None:
            return name
        if t.op.kind is OpKind.PROGRAM_VAR:
            scoped = self.scope_name_of(t.op)
            if scoped is not None:
                return scoped
        if t.op.kind is OpKind.BOUND_VAR:
            return t.op.name
        if t.op == LENGTH:
            return f"{self.term(t.children[0], gap)}.length"
        if t.op == SELECT:
            return self.select(t, gap)
        if t.op in (INTDIV, IMOD):
            sym = "/" if t.op == INTDIV else "%"
            return f"({self.int_term(t.children[0], gap)} {sym} {self.int_term(t.children[1], gap)})"
        if t.op.kind is OpKind.CONSTANT and isinstance(t.op.payload, int):
            return t.op.name
        if t.op.kind is OpKind.SKOLEM and t.op in self.ctx.heapmap.var_copies:
            return self.copy_fallback(t, gap)
        if t.op.kind is OpKind.PROGRAM_VAR and t.op in self.ctx.heapmap.var_copies:
            return self.copy_fallback(t, gap)
        if t.op == ITE:
            raise Untranslatable(
                "conditional terms from aliasing case distinctions have no "
                "specification-level form"
            )
        if t.op.kind is OpKind.SKOLEM:
            raise Untranslatable(
                f"skolem constant {t.op.name!r} has no specification-level form"
            )
        raise Untranslatable(f"no specification-level form for {t.op.name!r}")

    def copy_fallback(self, t: Term, gap: int) -> str:
        """Render a variable copy as \\old<line>(x) at a state that binds it."""
        base_op, _ = self.ctx.heapmap.var_copies[t.op]
        base_name = next(
            (n for n, op in self.ctx.info.scope.items() if op == base_op), None
        )
        if base_name is None:
            raise Untranslatable(f"internal variable copy {t.op.name!r}")
        steps = self.ctx.steps()
        for g in range(min(gap, len(steps) - 1), -1, -1):
            bound = self.ctx.state_at(g).get(base_op)
            value = bound if bound is not None else pv_term(base_op)
            if value == t and g < len(steps):
                line = steps[g].line
                self.state_refs.append((base_name, line))
                return f"\\old<{line}>({base_name})"
        raise Untranslatable(f"internal variable copy {t.op.name!r}")

    # -- objects, fields, heap access ----------------------------------------

    def term(self, t: Term, gap: int) -> str:
        if t.sort.kind == "int":
            return self.int_term(t, gap)
        name = self.match_var(t, gap)
        if name is not None:
            return name
        if t.op.kind is OpKind.PROGRAM_VAR:
            scoped = self.scope_name_of(t.op)
            if scoped is not None:
                return scoped
        if t.op.name == "null":
            return "null"
        if t.op == SELECT:
            return self.select(t, gap)
        if self.ctx.po.self_var is not None and t == pv_term(self.ctx.po.self_var):
            return "this"
        if t.op.kind is OpKind.BOUND_VAR:
            return t.op.name
        raise Untranslatable(f"no specification-level form for {t.op.name!r}")

    def select(self, t: Term, gap: int) -> str:
        heap, obj, fld = t.children
        cur = self.current_heap(gap)
        if heap == cur:
            return self.access(obj, fld, gap)
        if heap == pv_term(self.ctx.po.heap_var):
            inner = self.access(obj, fld, 0)
            return f"\\old({inner})"
        g = self.gap_of_heap(heap, gap)
        steps = self.ctx.steps()
        if g is not None and g < len(steps):
            line = steps[g].line
            inner = self.access(obj, fld, g)
            self.state_refs.append((inner, line))
            return f"\\old<{line}>({inner})"
        raise Untranslatable(
            "the formula reads a heap state that has no expressible source position"
        )

    def access(self, obj: Term, fld: Term, gap: int) -> str:
        if fld.op == ARR:
            return f"{self.term(obj, gap)}[{self.int_term(fld.children[0], gap)}]"
        if fld.op.kind is OpKind.CONSTANT and "::" in fld.op.name:
            field_name = fld.op.name.split("$", 1)[1]
            if self.ctx.po.self_var is not None and obj == pv_term(self.ctx.po.self_var):
                if field_name not in self.ctx.info.scope:
                    return field_name
                return f"this.{field_name}"
            return f"{self.term(obj, gap)}.{field_name}"
        if fld.op.name == "$created":
            raise Untranslatable("object creation state is not expressible")
        raise Untranslatable(
            "the formula quantifies over heap locations (fields), which is "
            "not expressible at the specification level"
        )


def _poly_subst(
    monos: dict, atom: Term, repl_monos: dict, repl_const: int
) -> tuple[dict, int]:
    """Substitute `atom := repl + const` inside a polynomial (degree 1 only).

    Returns the rewritten monomials plus the constant contribution.
    """
    akey = (term_key(atom), atom)
    out: dict = {}
    const_delta = 0

    def add(mono, coeff):
        nonlocal const_delta
        if coeff == 0:
            return
        if not mono:
            const_delta += coeff
            return
        out[mono] = out.get(mono, 0) + coeff
        if out[mono] == 0:
            del out[mono]

    for mono, coeff in monos.items():
        occurrences = [p for p in mono if p == akey]
        if not occurrences:
            add(mono, coeff)
            continue
        if len(occurrences) > 1:
            add(mono, coeff)  # quadratic in the copy: leave untouched
            continue
        rest = tuple(p for p in mono if p != akey)
        # coeff * rest * (repl + const)
        for rm, rv in repl_monos.items():
            merged = tuple(sorted(rest + rm, key=lambda p: p[0]))
            add(merged, coeff * rv)
        add(rest, coeff * repl_const)
    return out, const_delta


def render_structurally(
    formula: Term, ctx: RenderCtx, gap: int
) -> tuple[str, list[tuple[str, int]]]:
    r = _Renderer(ctx, gap)
    text = r.formula(formula, gap)
    return text, r.state_refs


def retranslate(
    formula: Term, ctx: RenderCtx, gap: int
) -> tuple[str, str, str, list[tuple[str, int]]]:
    """Back-translate one displayed formula.

    Returns (text, status, message, state_refs) with status one of
    'Verbatim', 'Retranslated', 'Untranslatable'.
    """
    inlined = inline_pullouts(formula, ctx.info.pullout_defs)

    origins = origin_of(inlined)
    spanned = [o for o in origins if o.span is not None]
    if len(origins) == 1 and len(spanned) == 1:
        span = spanned[0].span
        text = span_text(ctx.po.unit, span)
        reparsed = try_parse_translate(text, ctx, gap)
        if reparsed is not None and reparsed == inlined:
            return text, "Verbatim", "", []

    try:
        text, refs = render_structurally(inlined, ctx, gap)
    except Untranslatable as e:
        return term_to_str(inlined), "Untranslatable", e.message, []
    reparsed = try_parse_translate(text, ctx, gap)
    if reparsed is None or reparsed != inlined:
        return (
            term_to_str(inlined),
            "Untranslatable",
            "the internal formula has no faithful source-level rendering",
            [],
        )
    return text, "Retranslated", "", refs
