"""Proof tree: nodes, goal bookkeeping, rule application log, pruning."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..calculus import (
    CalculusError, FreshNames, GoalState, NodeInfo, RuleApplication,
    apply_rule, initial_node_info,
)
from ..logic import Sequent
from ..pogen import ProofObligation


@dataclass
class LogEntry:
    """One applied rule in a serializable form.

    The descriptor references instantiation terms by textual key or source
    text, never by object identity, and the fresh-name snapshot taken before
    the application makes replay reproduce identical names.
    """

    node_id: int
    descriptor: dict
    fresh_before: dict
    next_id_before: int
    child_ids: tuple[int, ...]


def describe_app(app: RuleApplication) -> dict:
    from ..logic import Term, term_key

    inst = {}
    for key, value in app.instantiations:
        if isinstance(value, Term):
            inst[key] = {"kind": "key", "key": term_key(value)}
        elif isinstance(value, dict):
            inst[key] = value
        else:
            inst[key] = {"kind": "name", "name": str(value)}
    return {
        "rule": app.rule_id,
        "focus": {
            "side": app.focus.side,
            "index": app.focus.index,
            "path": list(app.focus.path),
        },
        "inst": inst,
    }


class ProofNode:
    def __init__(self, node_id: int, sequent: Sequent, info: NodeInfo,
                 parent: Optional["ProofNode"], branch_label: str = ""):
        self.id = node_id
        self.sequent = sequent
        self.info = info
        self.parent = parent
        self.branch_label = branch_label
        self.children: list[ProofNode] = []
        self.applied: Optional[RuleApplication] = None
        self.closing = False  # a Closing rule discharged this node
        self.interaction_log: list = []

    def is_closed(self) -> bool:
        if self.closing:
            return True
        if not self.children:
            return False
        return all(c.is_closed() for c in self.children)

    def is_open_goal(self) -> bool:
        return not self.children and not self.closing

    def label_path(self) -> list[str]:
        out = []
        node = self
        while node is not None:
            if node.branch_label:
                out.append(node.branch_label)
            node = node.parent
        return list(reversed(out))


class ProofTree:
    def __init__(self, po: ProofObligation):
        self.po = po
        self.fresh = FreshNames()
        root_info = initial_node_info(po)
        self.root = ProofNode(0, po.root_sequent, root_info, None)
        self.nodes: dict[int, ProofNode] = {0: self.root}
        self._next_id = 1
        self.log: list[LogEntry] = []

    # ---- queries ----------------------------------------------------------

    def node(self, node_id: int) -> ProofNode:
        if node_id not in self.nodes:
            raise KeyError(f"no node {node_id}")
        return self.nodes[node_id]

    def open_goals(self) -> list[ProofNode]:
        return [n for n in self.nodes.values() if n.is_open_goal()]

    def is_closed(self) -> bool:
        return self.root.is_closed()

    def goal_state(self, node: ProofNode) -> GoalState:
        return GoalState(node.sequent, node.info, self.po)

    # ---- mutation ---------------------------------------------------------

    def apply(self, node_id: int, app: RuleApplication,
              descriptor: Optional[dict] = None) -> list[ProofNode]:
        node = self.node(node_id)
        if not node.is_open_goal():
            raise CalculusError("goal already closed")
        snapshot = self.fresh.snapshot()
        next_id_before = self._next_id
        children = apply_rule(self.goal_state(node), app, self.fresh)
        node.applied = app
        new_nodes = []
        if not children:
            node.closing = True
        for child in children:
            n = ProofNode(self._next_id, child.sequent, child.info, node, child.label)
            self._next_id += 1
            node.children.append(n)
            self.nodes[n.id] = n
            new_nodes.append(n)
        self.log.append(
            LogEntry(node_id, descriptor or describe_app(app), snapshot,
                     next_id_before, tuple(n.id for n in new_nodes))
        )
        return new_nodes

    def set_next_id(self, value: int):
        self._next_id = value

    def prune(self, node_id: int):
        """Undo everything below a node; it becomes an open goal again."""
        node = self.node(node_id)
        dropped = set()

        def drop(n: ProofNode):
            for c in n.children:
                drop(c)
                dropped.add(c.id)
                del self.nodes[c.id]
            n.children = []

        drop(node)
        node.applied = None
        node.closing = False
        self.log = [
            e for e in self.log
            if e.node_id in self.nodes and not (set(e.child_ids) & dropped)
        ]

    # ---- structure compare (persistence, record/replay) -------------------

    def shape(self) -> list[tuple]:
        """Structural fingerprint: (depth-first label path, rule id) pairs."""
        out = []

        def walk(n: ProofNode, path: tuple):
            rule = n.applied.rule_id if n.applied else None
            out.append((path, n.branch_label, rule, n.closing))
            for i, c in enumerate(n.children):
                walk(c, path + (i,))

        walk(self.root, ())
        return out
