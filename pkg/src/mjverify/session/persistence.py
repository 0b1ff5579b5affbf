"""Proof persistence: obligation identification plus an ordered rule log.

A saved proof names its source file by content hash and replays the stored
rule applications against the freshly regenerated proof obligation; a
changed source surfaces as a divergence report naming the first failing
step rather than a silently different proof.
"""

from __future__ import annotations

import hashlib
from typing import Optional

from ..calculus import CalculusError, Focus, RuleApplication, enumerate_foci, resolve_focus
from ..frontend import ast
from ..logic import Term, term_key
from ..pogen import generate_po
from .tree import LogEntry, ProofTree

MAGIC = "mjverify-proof"
VERSION = 1


class PersistenceError(Exception):
    pass


class RestoreDivergence(PersistenceError):
    def __init__(self, step: int, reason: str, source_changed: bool):
        super().__init__(
            f"replay diverged at step {step}: {reason}"
            + (" (source file changed since the proof was saved)" if source_changed else "")
        )
        self.step = step
        self.reason = reason
        self.source_changed = source_changed


def source_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def persist(tree: ProofTree) -> dict:
    po = tree.po
    steps = []
    for entry in tree.log:
        steps.append(
            {
                "node": entry.node_id,
                "app": entry.descriptor,
                "fresh": entry.fresh_before,
                "nextId": entry.next_id_before,
                "children": list(entry.child_ids),
                "labels": [
                    tree.nodes[c].branch_label
                    for c in entry.child_ids
                    if c in tree.nodes
                ],
            }
        )
    return {
        "magic": MAGIC,
        "version": VERSION,
        "sourcePath": po.unit.path,
        "sourceHash": source_hash(po.unit.raw_text),
        "method": po.method.name,
        "steps": steps,
    }


def resolve_descriptor(tree: ProofTree, node, descriptor: dict) -> RuleApplication:
    focus = Focus(
        descriptor["focus"]["side"],
        descriptor["focus"]["index"],
        tuple(descriptor["focus"]["path"]),
    )
    insts = []
    for key, spec in descriptor.get("inst", {}).items():
        if spec["kind"] == "name":
            insts.append((key, spec["name"]))
        elif spec["kind"] == "key":
            term = _find_by_key(tree, node, spec["key"])
            if term is None:
                raise CalculusError(f"no term with key {spec['key']!r} in the goal")
            insts.append((key, term))
        elif spec["kind"] == "text":
            from ..script import user_formula_term

            insts.append((key, user_formula_term(spec["text"], tree, node)))
        else:
            raise CalculusError(f"unknown instantiation kind {spec['kind']!r}")
    return RuleApplication(descriptor["rule"], focus, tuple(insts))


def _find_by_key(tree: ProofTree, node, key: str) -> Optional[Term]:
    for focus in enumerate_foci(node.sequent):
        t = resolve_focus(node.sequent, focus)
        if term_key(t) == key:
            return t
    return None


def restore(document: dict, unit: ast.SourceUnit) -> tuple[ProofTree, bool]:
    """Rebuild a proof tree by replaying the stored applications.

    Returns (tree, source_changed).  A failing step raises
    RestoreDivergence naming the step.
    """
    if document.get("magic") != MAGIC:
        raise PersistenceError("not a proof document")
    if document.get("version") != VERSION:
        raise PersistenceError(
            f"unsupported proof document version {document.get('version')!r}"
        )
    changed = document.get("sourceHash") != source_hash(unit.raw_text)
    po = generate_po(unit, document["method"])
    tree = ProofTree(po)
    for i, step in enumerate(document["steps"]):
        node_id = step["node"]
        if node_id not in tree.nodes:
            raise RestoreDivergence(i, f"goal {node_id} does not exist", changed)
        node = tree.nodes[node_id]
        if not node.is_open_goal():
            raise RestoreDivergence(i, f"goal {node_id} is not open", changed)
        tree.fresh.restore(step["fresh"])
        if "nextId" in step:
            tree.set_next_id(step["nextId"])
        try:
            app = resolve_descriptor(tree, node, step["app"])
            children = tree.apply(node_id, app, step["app"])
        except CalculusError as e:
            raise RestoreDivergence(i, str(e), changed)
        except Exception as e:
            raise RestoreDivergence(i, f"{type(e).__name__}: {e}", changed)
        got = [c.branch_label for c in children]
        if got != step.get("labels", got):
            raise RestoreDivergence(
                i, f"branch labels changed: expected {step['labels']}, got {got}",
                changed,
            )
        if [c.id for c in children] != step.get("children", [c.id for c in children]):
            raise RestoreDivergence(i, "proof tree shape changed", changed)
    return tree, changed
