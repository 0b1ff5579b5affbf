"""In-memory proof sessions with single-writer discipline and macro jobs."""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Optional

from ..calculus import CalculusError, Focus, RuleApplication, applicable_rules
from ..frontend import FrontendError, ast, load_unit
from ..logic import term_to_str
from ..pogen import PogenError, generate_po
from ..render import NotRenderable, goal_view, render_sequent
from ..script import (
    Command, ReplayResult, ScriptError, execute_command, parse_script, record,
    replay,
)
from ..strategy import MacroKind, MacroResult, StrategySettings, run_macro
from .persistence import PersistenceError, persist, restore
from .tree import ProofNode, ProofTree


class SessionError(Exception):
    def __init__(self, code: str, message: str, status: int = 422):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status


def _not_found(message: str) -> SessionError:
    return SessionError("not_found", message, 404)


def _conflict(code: str, message: str) -> SessionError:
    return SessionError(code, message, 409)


@dataclass
class Job:
    id: str
    kind: str
    done: bool = False
    cancelled: bool = False
    result: Optional[dict] = None
    error: Optional[str] = None
    _stop: threading.Event = field(default_factory=threading.Event)


class Session:
    _ids = itertools.count(1)

    def __init__(self, source: str, path: str):
        self.id = f"s{next(Session._ids)}"
        self.unit = load_unit(source, path)  # raises FrontendError
        self.tree: Optional[ProofTree] = None
        self.selected_goal: Optional[int] = None
        self.settings = StrategySettings()
        self.interaction_log: list[tuple[int, Command]] = []
        self.lock = threading.RLock()
        self.jobs: dict[str, Job] = {}
        self._job_ids = itertools.count(1)
        self._busy = False

    # ---- guards ------------------------------------------------------------

    def _require_tree(self) -> ProofTree:
        if self.tree is None:
            raise _conflict("no_proof", "no proof started in this session")
        return self.tree

    def _require_goal(self, goal_id: int) -> ProofNode:
        tree = self._require_tree()
        try:
            node = tree.node(goal_id)
        except KeyError:
            raise _not_found(f"no goal {goal_id}")
        return node

    def _require_open_goal(self, goal_id: int) -> ProofNode:
        node = self._require_goal(goal_id)
        if not node.is_open_goal():
            raise _conflict("goal_closed", f"goal {goal_id} is closed or expanded")
        return node

    def _begin_mutation(self):
        if self._busy:
            raise _conflict("busy", "a proof job is running in this session")

    # ---- queries -----------------------------------------------------------

    def methods(self) -> list[dict]:
        out = []
        for cls in self.unit.classes:
            for m in cls.methods:
                out.append(
                    {
                        "class": cls.name,
                        "name": m.name,
                        "line": m.header_line,
                        "hasContract": bool(
                            m.contract.requires or m.contract.ensures
                            or m.contract.assignable
                        ),
                    }
                )
        return out

    def open_goal_ids(self) -> list[int]:
        tree = self._require_tree()
        return sorted(n.id for n in tree.open_goals())

    def tree_json(self) -> dict:
        tree = self._require_tree()

        def node_json(n: ProofNode) -> dict:
            renderable = True
            try:
                from ..render import build_heap_map

                build_heap_map(n.sequent, n.info)
            except NotRenderable:
                renderable = False
            return {
                "id": n.id,
                "branchLabel": n.branch_label,
                "rule": n.applied.rule_id if n.applied else None,
                "closed": n.is_closed(),
                "open": n.is_open_goal(),
                "renderable": renderable and not n.is_closed(),
                "children": [node_json(c) for c in n.children],
            }

        return {
            "method": tree.po.method.name,
            "closed": tree.is_closed(),
            "root": node_json(tree.root),
            "openGoals": self.open_goal_ids(),
        }

    def view_json(self, goal_id: int) -> dict:
        node = self._require_goal(goal_id)
        tree = self._require_tree()
        try:
            view = goal_view(
                node.id, node.sequent, node.info, tree.po, node.label_path(),
                closed=node.is_closed(),
            )
        except NotRenderable as e:
            raise SessionError("not_renderable", e.reason, 409)
        return view.to_json()

    def sequent_json(self, goal_id: int) -> dict:
        node = self._require_goal(goal_id)
        return {
            "goalId": node.id,
            "text": render_sequent(node.sequent),
            "branchLabelPath": node.label_path(),
        }

    def applicable_json(self, goal_id: int, side: str, index: int, path: list[int]) -> dict:
        node = self._require_goal(goal_id)
        tree = self._require_tree()
        focus = Focus(side, index, tuple(path))
        try:
            rules = applicable_rules(tree.goal_state(node), focus)
        except CalculusError as e:
            raise SessionError("invalid_focus", str(e))
        return {
            "rules": [
                {"id": r.id, "category": r.category.value, "userOnly": r.user_only}
                for r in rules
            ],
            "macros": [k.value for k in MacroKind],
            "commands": ["cut", "instantiate", "witness", "hide", "expand", "split"],
        }

    # ---- mutations -----------------------------------------------------------

    def start_proof(self, method: str) -> dict:
        self._begin_mutation()
        try:
            po = generate_po(self.unit, method)
        except PogenError as e:
            raise _not_found(str(e))
        self.tree = ProofTree(po)
        self.selected_goal = 0
        self.interaction_log = []
        return self.tree_json()

    def select_goal(self, goal_id: int) -> dict:
        node = self._require_goal(goal_id)
        if not node.is_open_goal():
            raise _conflict("goal_closed", f"goal {goal_id} is not an open goal")
        self.selected_goal = goal_id
        return {"selected": goal_id}

    def command(self, goal_id: int, name: str, positional: list[str],
                options: dict[str, str]) -> dict:
        self._begin_mutation()
        tree = self._require_tree()
        node = self._require_open_goal(goal_id)
        cmd = Command(name, tuple(positional), tuple(options.items()))
        try:
            execute_command(tree, node, cmd, self.settings)
        except (ScriptError, CalculusError) as e:
            raise SessionError("command_failed", str(e))
        self.interaction_log.append((goal_id, cmd))
        return {"openGoals": self.open_goal_ids(), "closed": tree.is_closed()}

    def apply_rule_at(self, goal_id: int, rule_id: str, side: str, index: int,
                      path: list[int]) -> dict:
        self._begin_mutation()
        tree = self._require_tree()
        node = self._require_open_goal(goal_id)
        from ..script import focus_text

        focus = Focus(side, index, tuple(path))
        app = RuleApplication(rule_id, focus)
        try:
            tree.apply(goal_id, app)
        except CalculusError as e:
            raise SessionError("rule_failed", str(e))
        self.interaction_log.append(
            (goal_id, Command("rule", (rule_id,), (("focus", focus_text(focus)),)))
        )
        return {"openGoals": self.open_goal_ids(), "closed": tree.is_closed()}

    def start_macro(self, goal_id: Optional[int], kind: str,
                    max_rule_apps: Optional[int]) -> dict:
        self._begin_mutation()
        tree = self._require_tree()
        if goal_id is not None:
            self._require_open_goal(goal_id)
        try:
            macro_kind = MacroKind(kind)
        except ValueError:
            raise SessionError("unknown_macro", f"unknown macro {kind!r}")
        settings = StrategySettings(
            max_rule_apps=max_rule_apps or self.settings.max_rule_apps,
            macro=macro_kind,
            quant_inst_budget=self.settings.quant_inst_budget,
        )
        job = Job(f"j{next(self._job_ids)}", f"macro:{kind}")
        self.jobs[job.id] = job
        self._busy = True

        def work():
            try:
                result = run_macro(tree, goal_id, settings, job._stop.is_set)
                job.result = {
                    "closedGoals": result.closed_goals,
                    "openGoals": result.open_goals,
                    "ruleAppsUsed": result.rule_apps_used,
                    "budgetExhausted": result.budget_exhausted,
                    "cancelled": result.cancelled,
                    "proofClosed": tree.is_closed(),
                }
            except Exception as e:  # surfaced via the job, never swallowed
                job.error = str(e)
            finally:
                with self.lock:
                    job.done = True
                    self._busy = False

        cmd_name = "auto" if macro_kind is MacroKind.FULL_AUTO else "macro"
        positional = () if macro_kind is MacroKind.FULL_AUTO else (macro_kind.value,)
        self.interaction_log.append(
            (goal_id if goal_id is not None else 0, Command(cmd_name, positional))
        )
        threading.Thread(target=work, daemon=True).start()
        return {"jobId": job.id}

    def job_json(self, job_id: str) -> dict:
        if job_id not in self.jobs:
            raise _not_found(f"no job {job_id}")
        job = self.jobs[job_id]
        out = {
            "jobId": job.id,
            "kind": job.kind,
            "status": "done" if job.done else "running",
        }
        if job.error:
            out["status"] = "error"
            out["error"] = job.error
        if job.result is not None:
            out["result"] = job.result
            out["openGoals"] = self.open_goal_ids()
        return out

    def cancel_job(self, job_id: str) -> dict:
        if job_id not in self.jobs:
            raise _not_found(f"no job {job_id}")
        self.jobs[job_id]._stop.set()
        return {"cancelling": True}

    def replay_script(self, text: str, goal_id: Optional[int]) -> dict:
        self._begin_mutation()
        tree = self._require_tree()
        try:
            script = parse_script(text)
        except ScriptError as e:
            raise SessionError("script_parse_error", str(e))
        gid = goal_id if goal_id is not None else (self.selected_goal or 0)
        self._require_open_goal(gid)
        result = replay(script, tree, gid, self.settings)
        for cmd in script.commands:
            self.interaction_log.append((gid, cmd))
        return {
            "status": result.status,
            "error": result.error,
            "trace": [
                {"command": c, "goals": goals} for c, goals in result.trace
            ],
            "openGoals": self.open_goal_ids(),
            "closed": tree.is_closed(),
        }

    def record_script(self, branch_id: int) -> dict:
        tree = self._require_tree()
        self._require_goal(branch_id)
        text = record(self.interaction_log, tree, branch_id)
        return {"script": text}

    def prune(self, node_id: int) -> dict:
        self._begin_mutation()
        tree = self._require_tree()
        self._require_goal(node_id)
        tree.prune(node_id)
        if self.selected_goal not in tree.nodes:
            self.selected_goal = node_id
        return {"openGoals": self.open_goal_ids(), "closed": tree.is_closed()}

    def save(self) -> dict:
        tree = self._require_tree()
        return persist(tree)

    def load(self, document: dict) -> dict:
        self._begin_mutation()
        tree, changed = restore(document, self.unit)  # raises on divergence
        self.tree = tree
        self.selected_goal = None
        self.interaction_log = []
        return {
            "openGoals": self.open_goal_ids(),
            "closed": tree.is_closed(),
            "sourceChanged": changed,
        }


class SessionStore:
    def __init__(self):
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()

    def create(self, source: str, path: str) -> Session:
        session = Session(source, path)
        with self.lock:
            self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        if session_id not in self.sessions:
            raise _not_found(f"no session {session_id}")
        return self.sessions[session_id]
