"""Canonical textual form for terms and sequents.

Heap functions print prefix, arithmetic and logic print infix, update
applications as `{u}t`, diamonds as `\\<{ ... }\\> phi`.  The goal renderer
does not use this form for annotations; it is the fallback sequent view and
the persistence format's focus descriptor.
"""

from __future__ import annotations

from .terms import (
    ADD, AND, EQ, FALSE_OP, GT, IMP, INTDIV, IMOD, ITE, MUL, NOT, OR, TRUE_OP,
    OpKind, Term,
)

_PREC_IMP = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4
_PREC_CMP = 5
_PREC_ADD = 6
_PREC_MUL = 7
_PREC_ATOM = 9


def term_to_str(t: Term) -> str:
    return _render(t, 0)


def _render(t: Term, outer: int) -> str:
    op = t.op
    if op.kind is OpKind.MODALITY:
        prog = op.payload
        body = " ".join(_item(item, prog.unit) for item in prog.items)
        return f"\\<{{ {body} }}\\>({_render(t.children[0], 0)})"
    if op.kind is OpKind.UPDATE:
        u = op.payload
        inner = " || ".join(f"{v.name} := {_render(val, 0)}" for v, val in u.bindings)
        return f"{{{inner}}}({_render(t.children[0], 0)})"
    if op.kind is OpKind.QUANTIFIER:
        kw = "\\forall" if op.name == "forall" else "\\exists"
        var = op.payload
        return f"({kw} {var.payload} {var.name}; {_render(t.children[0], 0)})"
    if op == TRUE_OP:
        return "true"
    if op == FALSE_OP:
        return "false"
    if op == NOT:
        return _wrap(f"!{_render(t.children[0], _PREC_NOT)}", _PREC_NOT, outer)
    if op == AND:
        return _binop(t, "&", _PREC_AND, outer)
    if op == OR:
        return _binop(t, "|", _PREC_OR, outer)
    if op == IMP:
        return _binop(t, "->", _PREC_IMP, outer)
    if op == EQ:
        return _binop(t, "=", _PREC_CMP, outer)
    if op == GT:
        return _binop(t, ">", _PREC_CMP, outer)
    if op == ADD:
        return _binop(t, "+", _PREC_ADD, outer)
    if op == MUL:
        return _binop(t, "*", _PREC_MUL, outer)
    if op in (INTDIV, IMOD):
        name = "div" if op == INTDIV else "mod"
        return f"{name}({_render(t.children[0], 0)}, {_render(t.children[1], 0)})"
    if op == ITE:
        args = ", ".join(_render(c, 0) for c in t.children)
        return f"if({args})"
    if not t.children:
        return op.name
    args = ", ".join(_render(c, 0) for c in t.children)
    return f"{op.name}({args})"


def _item(item, unit) -> str:
    from .program import EntryCall, item_text

    if isinstance(item, EntryCall):
        return f"res = self.{item.method_name}(...);"
    if unit is not None:
        return item_text(item, unit.raw_text)
    return f"<stmt@{item.span.start_line}>"


def _binop(t: Term, sym: str, prec: int, outer: int) -> str:
    left = _render(t.children[0], prec + 1)
    # associative chains of the same operator render flat
    right_prec = prec if t.op in (AND, OR, ADD, IMP) else prec + 1
    right = _render(t.children[1], right_prec)
    return _wrap(f"{left} {sym} {right}", prec, outer)


def _wrap(s: str, prec: int, outer: int) -> str:
    return f"({s})" if prec < outer else s


def sequent_to_str(seq) -> str:
    ante = ", ".join(term_to_str(t) for t in seq.antecedent)
    succ = ", ".join(term_to_str(t) for t in seq.succedent)
    if ante:
        return f"{ante} ==> {succ}" if succ else f"{ante} ==>"
    return f"==> {succ}" if succ else "==>"
