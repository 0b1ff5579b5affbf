"""Shared goal-state machinery for the calculus.

Rules are pure functions from a goal (sequent plus bookkeeping) to child
goals.  The bookkeeping (`NodeInfo`) records what the renderer later needs:
the executed path with per-step state snapshots, the source lines of heap
terms created by symbolic execution, variable copies, label states, and the
introduction position of each sequent formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from ..frontend import ast
from ..logic import Operator, Sequent, Term, Update


class CalculusError(Exception):
    pass


@dataclass(frozen=True)
class PathStep:
    """One executed statement on the path leading to a goal."""

    line: int
    span: Optional[ast.Span]
    heap_created: Optional[Term]  # store/anon term this step introduced
    var_events: tuple[tuple[Operator, Term, Term], ...]  # (var, before, after)
    update_before: Update
    update_after: Update
    is_anon: bool = False  # heap event abstracts a loop or call


@dataclass(frozen=True)
class FormulaMeta:
    intro_gap: int
    seq: int


@dataclass(frozen=True)
class NodeInfo:
    entry_line: int
    path: tuple[PathStep, ...] = ()
    pending_span: Optional[ast.Span] = None  # active statement not yet executed
    heap_lines: dict[Term, int] = field(default_factory=dict)
    var_copies: dict[Operator, tuple[Operator, int]] = field(default_factory=dict)
    label_states: dict[str, Update] = field(default_factory=dict)
    line_states: dict[int, Update] = field(default_factory=dict)
    formula_meta: dict[Term, FormulaMeta] = field(default_factory=dict)
    seq_counter: int = 0
    pullout_defs: dict[Operator, Term] = field(default_factory=dict)
    scope: dict[str, Operator] = field(default_factory=dict)
    var_types: dict[str, ast.TypeRef] = field(default_factory=dict)
    insts_done: frozenset = frozenset()

    # NodeInfo values are treated immutably: every evolution copies the dicts.

    def evolve(self, **kw) -> "NodeInfo":
        base = dict(
            entry_line=self.entry_line,
            path=self.path,
            pending_span=self.pending_span,
            heap_lines=dict(self.heap_lines),
            var_copies=dict(self.var_copies),
            label_states=dict(self.label_states),
            line_states=dict(self.line_states),
            formula_meta=dict(self.formula_meta),
            seq_counter=self.seq_counter,
            pullout_defs=dict(self.pullout_defs),
            scope=dict(self.scope),
            var_types=dict(self.var_types),
            insts_done=self.insts_done,
        )
        base.update(kw)
        return NodeInfo(**base)

    @property
    def end_gap(self) -> int:
        return len(self.path)

    def record_formulas(self, terms, gap: Optional[int] = None) -> "NodeInfo":
        """Remember introduction position and emission order of new formulas."""
        meta = dict(self.formula_meta)
        counter = self.seq_counter
        g = self.end_gap if gap is None else gap
        for t in terms:
            if t not in meta:
                meta[t] = FormulaMeta(g, counter)
                counter += 1
        return self.evolve(formula_meta=meta, seq_counter=counter)

    def meta_for(self, t: Term) -> FormulaMeta:
        return self.formula_meta.get(t, FormulaMeta(0, -1))


class FreshNames:
    """Deterministic fresh-name source, one per proof tree.

    Copies and skolem constants share the `base_k` scheme (k_0, k_1, ...).
    The counter state is recorded in the proof log so replay regenerates
    identical names.
    """

    def __init__(self, counters: Optional[dict[str, int]] = None,
                 used: Optional[set[str]] = None):
        self.counters: dict[str, int] = dict(counters or {})
        self.used: set[str] = set(used or ())

    def fresh(self, base: str) -> str:
        n = self.counters.get(base, 0)
        while f"{base}_{n}" in self.used:
            n += 1
        self.counters[base] = n + 1
        name = f"{base}_{n}"
        self.used.add(name)
        return name

    def claim(self, name: str):
        if name in self.used:
            raise CalculusError(f"name {name!r} already in use")
        self.used.add(name)

    def snapshot(self) -> dict:
        return {"counters": dict(self.counters), "used": sorted(self.used)}

    def restore(self, snap: dict):
        self.counters = dict(snap["counters"])
        self.used = set(snap["used"])


@dataclass(frozen=True)
class GoalState:
    sequent: Sequent
    info: NodeInfo
    po: object = None  # the owning ProofObligation (set by the proof tree)


@dataclass(frozen=True)
class ChildGoal:
    sequent: Sequent
    info: NodeInfo
    label: str = ""


@dataclass(frozen=True)
class Focus:
    """Position of a (sub)term in a sequent: side, formula index, child path."""

    side: str  # 'ante' | 'succ'
    index: int
    path: tuple[int, ...] = ()

    def __str__(self):
        p = ".".join(str(i) for i in self.path)
        return f"{self.side}[{self.index}]" + (f".{p}" if p else "")


def resolve_focus(sequent: Sequent, focus: Focus) -> Term:
    side = sequent.side(focus.side)
    if not (0 <= focus.index < len(side)):
        raise CalculusError(f"invalid focus {focus}: no such formula")
    t = side[focus.index]
    for i in focus.path:
        if i >= len(t.children):
            raise CalculusError(f"invalid focus {focus}: path leaves the term")
        t = t.children[i]
    return t


def replace_at(sequent: Sequent, focus: Focus, new_sub: Term) -> Sequent:
    """Replace the subterm at `focus`, rebuilding the spine above it."""
    side = sequent.side(focus.side)
    formula = side[focus.index]

    def rebuild(t: Term, path: tuple[int, ...]) -> Term:
        if not path:
            return new_sub
        i = path[0]
        kids = list(t.children)
        kids[i] = rebuild(kids[i], path[1:])
        return Term(t.op, tuple(kids), t.sort, t.origins)

    from ..logic import simplify

    rebuilt = simplify(rebuild(formula, focus.path))
    return sequent.with_replaced(focus.side, focus.index, rebuilt)


def under_binder(sequent: Sequent, focus: Focus) -> bool:
    """Whether the focus path crosses a quantifier."""
    from ..logic import OpKind

    side = sequent.side(focus.side)
    t = side[focus.index]
    for i in focus.path:
        if t.op.kind is OpKind.QUANTIFIER:
            return True
        t = t.children[i]
    return False


@dataclass(frozen=True)
class RuleApplication:
    """A concrete rule instance: rule id, focus, optional instantiations."""

    rule_id: str
    focus: Focus
    instantiations: tuple[tuple[str, object], ...] = ()

    def inst(self, key: str):
        for k, v in self.instantiations:
            if k == key:
                return v
        return None
