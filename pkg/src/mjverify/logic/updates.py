"""Explicit state changes: parallel updates and their application to terms."""

from __future__ import annotations

from typing import Iterable, Optional

from .norm import simplify
from .terms import Operator, OpKind, Term, mk_term


class Update:
    """A parallel update {x1 := t1 || x2 := t2 || ...}.

    Bindings to the same variable resolve right-wins.  All right-hand sides
    are evaluated simultaneously in the pre-state.
    """

    __slots__ = ("bindings", "_hash")

    def __init__(self, bindings: Iterable[tuple[Operator, Term]] = ()):
        resolved: dict[Operator, Term] = {}
        for var, val in bindings:
            assert var.kind is OpKind.PROGRAM_VAR, f"update target {var} not a program variable"
            resolved[var] = val
        object.__setattr__(self, "bindings", tuple(resolved.items()))
        object.__setattr__(self, "_hash", hash(self.bindings))

    def __setattr__(self, *_):
        raise AttributeError("updates are immutable")

    def __eq__(self, other):
        return isinstance(other, Update) and self.bindings == other.bindings

    def __hash__(self):
        return self._hash

    def __bool__(self):
        return bool(self.bindings)

    def get(self, var: Operator) -> Optional[Term]:
        for v, t in self.bindings:
            if v == var:
                return t
        return None

    def extended(self, var: Operator, value: Term) -> "Update":
        """Sequential composition with an elementary update evaluated now."""
        return Update(list(self.bindings) + [(var, value)])

    def parallel(self, other: "Update") -> "Update":
        return Update(list(self.bindings) + list(other.bindings))

    def __repr__(self):
        from .printing import term_to_str

        inner = " || ".join(f"{v.name} := {term_to_str(t)}" for v, t in self.bindings)
        return "{" + inner + "}"

    def as_map(self) -> dict[Operator, Term]:
        return dict(self.bindings)


EMPTY_UPDATE = Update()


def apply_update(u: Update, t: Term) -> Term:
    """Apply a parallel update as a simultaneous substitution, renormalizing.

    The term must not contain modalities below the applied position: symbolic
    execution rules, not update application, consume programs.
    """
    if not u:
        return simplify(t)
    mapping = u.as_map()
    return simplify(_subst(t, mapping))


def subst_program_vars(t: Term, mapping: dict[Operator, Term]) -> Term:
    """Raw simultaneous substitution without renormalization."""
    return _subst(t, mapping)


def _subst(t: Term, mapping: dict[Operator, Term]) -> Term:
    if t.op.kind is OpKind.MODALITY:
        raise ValueError("cannot apply an update below a modality")
    if t.op.kind is OpKind.PROGRAM_VAR:
        repl = mapping.get(t.op)
        return repl if repl is not None else t
    if not t.children:
        return t
    kids = tuple(_subst(c, mapping) for c in t.children)
    if kids == t.children:
        return t
    return Term(t.op, kids, t.sort, t.origins)


def update_app(u: Update, t: Term) -> Term:
    """The term {u}t; collapses immediately when the update is empty."""
    if not u:
        return t
    op = Operator("update-app", OpKind.UPDATE, u)
    return mk_term(op, (t,))
