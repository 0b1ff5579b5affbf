"""Source-level proof scripts: parsing, replay, recording.

Scripts use the surface syntax of `\\by` blocks: semicolon-terminated
commands, double-quoted string arguments, `key="value"` options.  Formula
arguments are matched against rendered annotation texts first and against
back-translated sequent formulas second; an ambiguous match is an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .calculus import CalculusError, Focus, RuleApplication
from .frontend import ast, parse_spec_expr
from .logic import AND, OpKind, OriginKind, Term
from .strategy import MacroKind, StrategySettings, run_macro
from .translate import TranslateError, translate, user_origin


class ScriptError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Command:
    name: str  # expand|witness|instantiate|cut|split|hide|auto|macro|rule
    positional: tuple[str, ...] = ()
    options: tuple[tuple[str, str], ...] = ()
    line: int = 0

    def opt(self, key: str) -> Optional[str]:
        for k, v in self.options:
            if k == key:
                return v
        return None

    def render(self) -> str:
        parts = [self.name]
        parts.extend(f'"{p}"' for p in self.positional)
        parts.extend(f'{k}="{v}"' for k, v in self.options)
        return " ".join(parts) + ";"


@dataclass
class Script:
    commands: tuple[Command, ...]
    target_method: Optional[str] = None
    target_branch: tuple[str, ...] = ()

    def render(self) -> str:
        lines = ["\\by {"]
        for c in self.commands:
            lines.append(f"  {c.render()}")
        lines.append("}")
        return "\n".join(lines)


_COMMANDS = {
    "expand", "witness", "instantiate", "cut", "split", "hide",
    "auto", "macro", "rule", "target", "branch",
}


def _strip_continuations(text: str) -> str:
    return re.sub(r"(\n[ \t]*)@", lambda m: m.group(1) + " ", text)


class _ScriptLexer:
    def __init__(self, text: str):
        self.text = _strip_continuations(text)
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, msg: str):
        raise ScriptError(msg, self.line, self.col)

    def _advance(self, n=1):
        for _ in range(n):
            if self.pos < len(self.text):
                if self.text[self.pos] == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
                self.pos += 1

    def tokens(self):
        out = []
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self._advance()
            elif self.text.startswith("//", self.pos):
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            elif c == '"':
                start = (self.line, self.col)
                self._advance()
                buf = []
                while self.pos < len(self.text) and self.text[self.pos] != '"':
                    buf.append(self.text[self.pos])
                    self._advance()
                if self.pos >= len(self.text):
                    raise ScriptError("unterminated string", *start)
                self._advance()
                out.append(("string", "".join(buf), start))
            elif c in ";=":
                out.append(("op", c, (self.line, self.col)))
                self._advance()
            elif c.isalnum() or c == "_" or c == "\\":
                start = (self.line, self.col)
                buf = []
                while self.pos < len(self.text) and (
                    self.text[self.pos].isalnum() or self.text[self.pos] in "_\\"
                ):
                    buf.append(self.text[self.pos])
                    self._advance()
                out.append(("word", "".join(buf), start))
            else:
                self.error(f"unexpected character {c!r} in script")
        out.append(("eof", "", (self.line, self.col)))
        return out


def parse_script(text: str) -> Script:
    """Parse a `\\by { ... }` body or a standalone script file."""
    tokens = _ScriptLexer(text).tokens()
    i = 0
    commands: list[Command] = []
    target_method = None
    target_branch: list[str] = []

    def peek():
        return tokens[i]

    while peek()[0] != "eof":
        kind, value, start = tokens[i]
        if kind != "word":
            raise ScriptError(f"expected a command, found {value!r}", *start)
        name = value.lstrip("\\")
        if name not in _COMMANDS:
            raise ScriptError(f"unknown command {value!r}", *start)
        i += 1
        positional: list[str] = []
        options: list[tuple[str, str]] = []
        while tokens[i][0] != "eof" and tokens[i][1] != ";":
            k, v, st = tokens[i]
            if k == "string":
                positional.append(v)
                i += 1
            elif k == "word":
                if tokens[i + 1][1] == "=":
                    key = v
                    i += 2
                    if tokens[i][0] not in ("string", "word"):
                        raise ScriptError(f"expected a value for {key!r}", *tokens[i][2])
                    options.append((key, tokens[i][1]))
                    i += 1
                else:
                    positional.append(v)
                    i += 1
            else:
                raise ScriptError(f"unexpected {v!r} in command arguments", *st)
        if tokens[i][1] != ";":
            raise ScriptError("expected ';'", *tokens[i][2])
        i += 1
        if name == "target":
            if not positional:
                raise ScriptError("target needs a method name", *start)
            target_method = positional[0]
        elif name == "branch":
            target_branch.extend(positional)
        else:
            commands.append(Command(name, tuple(positional), tuple(options), start[0]))
    return Script(tuple(commands), target_method, tuple(target_branch))


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------


@dataclass
class ReplayResult:
    status: str  # 'Closed' | 'Open' | 'Error'
    trace: list[tuple[str, list[int]]]  # (command text, resulting goal ids)
    error: Optional[str] = None


def user_formula(text: str, tree, node) -> Term:
    """Parse and translate a user-supplied formula at a goal's state."""
    parsed = parse_spec_expr(_strip_continuations(text), tree.po.unit.path)
    if isinstance(parsed, list):
        raise ScriptError(f"cannot parse formula {text!r}: {parsed[0].message}")
    from .render.retranslate import RenderCtx
    from .render.heapmap import HeapMap

    ctx = RenderCtx(tree.po, node.info, HeapMap({}, dict(node.info.var_copies)))
    env = ctx.env_at(len(node.info.path))
    env.origin = user_origin(tree.po.unit.path)
    try:
        return translate(parsed, env)
    except TranslateError as e:
        raise ScriptError(f"cannot translate formula {text!r}: {e.message}")


def match_formula(tree, node, text: str) -> tuple[str, int]:
    """Resolve a formula argument: annotation texts first, then terms."""
    matches: list[tuple[str, int]] = []
    try:
        from .render import goal_view

        view = goal_view(node.id, node.sequent, node.info, tree.po, node.label_path())
        for ann in view.annotations:
            if ann.text == text:
                ref = (ann.sequent_ref["side"], ann.sequent_ref["index"])
                if ref not in matches:
                    matches.append(ref)
    except Exception:
        pass
    if not matches:
        try:
            term = user_formula(text, tree, node)
        except ScriptError:
            term = None
        if term is not None:
            for side in ("ante", "succ"):
                for idx, f in enumerate(node.sequent.side(side)):
                    if f == term and (side, idx) not in matches:
                        matches.append((side, idx))
    if not matches:
        raise ScriptError(f"no formula matches {text!r} in this goal")
    if len(matches) > 1:
        raise ScriptError(f"ambiguous formula {text!r}: {matches}")
    return matches[0]


def _first_open(tree, scope_node) -> Optional[object]:
    goals = [
        n for n in tree.open_goals()
        if _descends(n, scope_node)
    ]
    return min(goals, key=lambda n: n.id) if goals else None


def _descends(node, ancestor) -> bool:
    n = node
    while n is not None:
        if n is ancestor:
            return True
        n = n.parent
    return False


def execute_command(tree, node, cmd: Command, settings: StrategySettings) -> list[int]:
    """Run one script command on one goal; returns resulting open goal ids."""
    if cmd.name == "auto":
        budget = settings.max_rule_apps
        if cmd.positional and cmd.positional[0].isdigit():
            budget = int(cmd.positional[0])
        elif cmd.opt("budget"):
            budget = int(cmd.opt("budget"))
        res = run_macro(tree, node.id, StrategySettings(
            max_rule_apps=budget, quant_inst_budget=settings.quant_inst_budget))
        return res.open_goals
    if cmd.name == "macro":
        kind_name = cmd.positional[0] if cmd.positional else cmd.opt("kind")
        try:
            kind = MacroKind(kind_name)
        except ValueError:
            raise ScriptError(f"unknown macro {kind_name!r}")
        res = run_macro(tree, node.id, StrategySettings(
            max_rule_apps=settings.max_rule_apps, macro=kind))
        return res.open_goals
    if cmd.name == "cut":
        if not cmd.positional:
            raise ScriptError("cut needs a formula")
        formula = user_formula(cmd.positional[0], tree, node)
        app = RuleApplication("cut", Focus("succ", 0, ()), (("formula", formula),))
        desc = {"rule": "cut", "focus": {"side": "succ", "index": 0, "path": []},
                "inst": {"formula": {"kind": "text", "text": cmd.positional[0]}}}
        return [n.id for n in tree.apply(node.id, app, desc)]
    if cmd.name == "split":
        for idx, f in enumerate(node.sequent.succedent):
            if f.op == AND:
                app = RuleApplication("andRight", Focus("succ", idx, ()))
                return [n.id for n in tree.apply(node.id, app)]
        raise ScriptError("split: no conjunction in the succedent")
    if cmd.name == "hide":
        if not cmd.positional:
            raise ScriptError("hide needs a formula")
        side, idx = match_formula(tree, node, cmd.positional[0])
        rule_id = "hideLeft" if side == "ante" else "hideRight"
        app = RuleApplication(rule_id, Focus(side, idx, ()))
        return [n.id for n in tree.apply(node.id, app)]
    if cmd.name == "witness":
        if not cmd.positional:
            raise ScriptError("witness needs an existential formula")
        side, idx = match_formula(tree, node, cmd.positional[0])
        f = node.sequent.side(side)[idx]
        if not (f.op.kind is OpKind.QUANTIFIER and f.op.name == "exists" and side == "ante"):
            raise ScriptError("witness expects an existential assumption")
        name = cmd.opt("as")
        insts = (("as", name),) if name else ()
        app = RuleApplication("exLeft", Focus(side, idx, ()), insts)
        desc = {"rule": "exLeft", "focus": {"side": side, "index": idx, "path": []},
                "inst": ({"as": {"kind": "name", "name": name}} if name else {})}
        return [n.id for n in tree.apply(node.id, app, desc)]
    if cmd.name == "instantiate":
        if not cmd.positional or not cmd.opt("inst"):
            raise ScriptError('instantiate needs a formula and inst="term"')
        side, idx = match_formula(tree, node, cmd.positional[0])
        f = node.sequent.side(side)[idx]
        term_text = cmd.opt("inst")
        term = user_formula_term(term_text, tree, node)
        if f.op.kind is OpKind.QUANTIFIER and f.op.name == "forall" and side == "ante":
            rule_id = "allLeft"
        elif f.op.kind is OpKind.QUANTIFIER and f.op.name == "exists" and side == "succ":
            rule_id = "exRight"
        else:
            raise ScriptError("instantiate expects a universal assumption or existential obligation")
        app = RuleApplication(rule_id, Focus(side, idx, ()), (("term", term),))
        desc = {"rule": rule_id, "focus": {"side": side, "index": idx, "path": []},
                "inst": {"term": {"kind": "text", "text": term_text}}}
        return [n.id for n in tree.apply(node.id, app, desc)]
    if cmd.name == "expand":
        target = cmd.opt("on") or (cmd.positional[0] if cmd.positional else None)
        if not target:
            raise ScriptError('expand needs on="..."')
        term = user_formula_term(target, tree, node)
        from .calculus import enumerate_foci, resolve_focus

        for focus in enumerate_foci(node.sequent):
            try:
                if resolve_focus(node.sequent, focus) == term:
                    app = RuleApplication("expandClassInv", focus)
                    desc = {"rule": "expandClassInv",
                            "focus": {"side": focus.side, "index": focus.index,
                                      "path": list(focus.path)},
                            "inst": {}}
                    return [n.id for n in tree.apply(node.id, app, desc)]
            except CalculusError:
                continue
        raise ScriptError(f"no occurrence of {target!r} to expand")
    if cmd.name == "rule":
        if not cmd.positional:
            raise ScriptError("rule needs a rule id")
        rule_id = cmd.positional[0]
        focus_text = cmd.opt("focus")
        if not focus_text:
            raise ScriptError('rule needs focus="A1" or focus="S1.0.2"')
        focus = parse_focus_text(focus_text, node.sequent)
        app = RuleApplication(rule_id, focus)
        return [n.id for n in tree.apply(node.id, app)]
    raise ScriptError(f"unknown command {cmd.name!r}")


def user_formula_term(text: str, tree, node) -> Term:
    """Like user_formula but also accepts non-boolean terms."""
    parsed = parse_spec_expr(_strip_continuations(text), tree.po.unit.path)
    if isinstance(parsed, list):
        raise ScriptError(f"cannot parse {text!r}: {parsed[0].message}")
    from .render.heapmap import HeapMap
    from .render.retranslate import RenderCtx

    ctx = RenderCtx(tree.po, node.info, HeapMap({}, dict(node.info.var_copies)))
    env = ctx.env_at(len(node.info.path))
    env.origin = user_origin(tree.po.unit.path)
    # skolem constants introduced by witness are referable by name
    skolems = {}
    for f in node.sequent.antecedent + node.sequent.succedent:
        for t in f.subterms():
            if t.op.kind is OpKind.SKOLEM:
                skolems.setdefault(t.op.name, t)
    env.values = {**env.values, **skolems}
    try:
        return translate(parsed, env)
    except TranslateError as e:
        raise ScriptError(f"cannot translate {text!r}: {e.message}")


def parse_focus_text(text: str, sequent) -> Focus:
    m = re.fullmatch(r"([AS])(\d+)((?:\.\d+)*)", text.strip())
    if not m:
        raise ScriptError(f"malformed focus {text!r}")
    side = "ante" if m.group(1) == "A" else "succ"
    index = int(m.group(2)) - 1
    path = tuple(int(p) for p in m.group(3).split(".")[1:]) if m.group(3) else ()
    if index < 0 or index >= len(sequent.side(side)):
        raise ScriptError(f"focus {text!r} does not exist in this goal")
    return Focus(side, index, path)


def focus_text(focus: Focus) -> str:
    tag = "A" if focus.side == "ante" else "S"
    path = "".join(f".{p}" for p in focus.path)
    return f"{tag}{focus.index + 1}{path}"


def replay(script: Script, tree, goal_id: int,
           settings: Optional[StrategySettings] = None) -> ReplayResult:
    """Execute the commands in order against the goal's open frontier."""
    settings = settings or StrategySettings()
    scope = tree.node(goal_id)
    if not scope.is_open_goal():
        return ReplayResult("Error", [], "goal already closed")
    trace: list[tuple[str, list[int]]] = []
    for cmd in script.commands:
        # every command targets the first open goal of the frontier, the
        # same discipline recording uses, so replay retraces the session
        target = _first_open(tree, scope)
        if target is None:
            trace.append((cmd.render(), []))
            continue
        try:
            goals = execute_command(tree, target, cmd, settings)
        except (ScriptError, CalculusError) as e:
            return ReplayResult("Error", trace, f"{cmd.render()} failed: {e}")
        trace.append((cmd.render(), goals))
    status = "Closed" if scope.is_closed() else "Open"
    return ReplayResult(status, trace)


def record(interaction_log: list[tuple[int, Command]], tree, branch_id: int) -> str:
    """Emit the script that reproduces the interactions below one branch."""
    scope = tree.node(branch_id)
    commands = []
    for node_id, cmd in interaction_log:
        if node_id in tree.nodes and _descends(tree.node(node_id), scope):
            commands.append(cmd)
    return Script(tuple(commands)).render()
