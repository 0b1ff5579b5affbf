"""Command line interface: verify, render, replay, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .calculus import CalculusError
from .frontend import FrontendError, ast, load_unit
from .logic import OriginKind, origin_of
from .pogen import PogenError, generate_po
from .render import GoalView, NotRenderable, goal_view
from .script import ReplayResult, ScriptError, parse_script, replay
from .session.tree import ProofTree
from .strategy import MacroKind, StrategySettings, run_macro

_KIND_COMMENT = {
    OriginKind.REQUIRES: "precondition",
    OriginKind.ENSURES: "postcondition",
    OriginKind.ASSIGNABLE: "frame",
    OriginKind.DECREASES: "decreases",
    OriginKind.LOOP_GUARD: "loop guard",
    OriginKind.LOOP_INVARIANT_INITIAL: "loop invariant",
    OriginKind.LOOP_INVARIANT_PRESERVED: "loop invariant",
    OriginKind.LOOP_INVARIANT_USE: "loop invariant",
}


def _load(path: str):
    text = Path(path).read_text()
    return load_unit(text, path)


def verify_method(unit: ast.SourceUnit, method: str,
                  settings: StrategySettings) -> ProofTree:
    """Full auto proof search plus replay of embedded `\\by` scripts."""
    po = generate_po(unit, method)
    tree = ProofTree(po)
    run_macro(tree, None, settings)
    _replay_by_scripts(unit, tree, settings)
    return tree


def _replay_by_scripts(unit: ast.SourceUnit, tree: ProofTree,
                       settings: StrategySettings):
    asserts_with_scripts = {}
    for cls in unit.classes:
        for m in cls.methods:
            def walk(stmt):
                if isinstance(stmt, ast.Assert) and stmt.by_script:
                    asserts_with_scripts[
                        (stmt.span.start_line, stmt.span.start_col)
                    ] = stmt.by_script
                elif isinstance(stmt, ast.Block):
                    for s in stmt.stmts:
                        walk(s)
                elif isinstance(stmt, ast.Labeled):
                    walk(stmt.stmt)
                elif isinstance(stmt, ast.IfElse):
                    walk(stmt.then_body)
                    if stmt.else_body:
                        walk(stmt.else_body)
                elif isinstance(stmt, ast.While):
                    walk(stmt.body)

            for s in m.body:
                walk(s)
    if not asserts_with_scripts:
        return
    for goal in list(tree.open_goals()):
        span = goal.info.pending_span
        if span is None:
            continue
        key = (span.start_line, span.start_col)
        if key not in asserts_with_scripts:
            continue
        try:
            script = parse_script(asserts_with_scripts[key])
            replay(script, tree, goal.id, settings)
        except (ScriptError, CalculusError) as e:
            print(f"note: \\by script at line {span.start_line} failed: {e}",
                  file=sys.stderr)


def _describe_open_goal(tree: ProofTree, goal, out):
    path = " / ".join(goal.label_path()) or "(root)"
    try:
        view = goal_view(goal.id, goal.sequent, goal.info, tree.po,
                         goal.label_path())
        asserts = [a for a in view.annotations if a.kind == "Assert"]
        if asserts:
            for a in asserts:
                print(
                    f"  {tree.po.unit.path}:{a.anchor_line}: cannot prove: "
                    f"{a.text}  [{path}]",
                    file=out,
                )
            return
    except NotRenderable:
        pass
    print(f"  open goal {goal.id} [{path}]", file=out)


def cmd_verify(args) -> int:
    unit = _load(args.file)
    settings = StrategySettings(max_rule_apps=args.max_steps)
    methods = []
    if args.method:
        methods = [args.method]
    else:
        for cls in unit.classes:
            methods.extend(m.name for m in cls.methods)
    any_open = False
    for name in methods:
        tree = verify_method(unit, name, settings)
        if tree.is_closed():
            print(f"{args.file}: {name}: proof closed "
                  f"({len(tree.log)} rule applications)")
        else:
            any_open = True
            goals = tree.open_goals()
            print(f"{args.file}: {name}: {len(goals)} open goal(s)",
                  file=sys.stderr)
            for goal in goals:
                _describe_open_goal(tree, goal, sys.stderr)
    return 1 if any_open else 0


def render_view_text(unit: ast.SourceUnit, view: GoalView) -> str:
    """The annotated-source form of a goal view.

    Generated lines carry a `//|G|` gutter tag inside a trailing comment so
    the emitted text is itself a syntactically valid compilation unit.
    """
    lines = unit.raw_text.split("\n")
    executed = {line: rank for line, rank in view.executed_lines}
    before: dict[int, list[str]] = {}
    after: dict[int, list[str]] = {}
    for ann in view.annotations:
        target = before if ann.placement == "before" else after
        indent = ""
        if 1 <= ann.anchor_line <= len(lines):
            src = lines[ann.anchor_line - 1]
            indent = src[: len(src) - len(src.lstrip())]
        comment = "//|G|"
        label = _annotation_label(ann)
        if label:
            comment += f" {label}"
        if ann.status == "Untranslatable":
            text = f"{indent}//@ {ann.kind.lower()} false; {comment} " \
                   f"UNTRANSLATABLE: {ann.message} [{ann.text}]"
        else:
            text = f"{indent}//@ {ann.kind.lower()} {ann.text}; {comment}"
        target.setdefault(ann.anchor_line, []).append(text)
    out = []
    for i, line in enumerate(lines, start=1):
        for extra in before.get(i, []):
            out.append(extra)
        marker = ""
        if view.active_line == i and not view.active_executed:
            marker = " // [active]"
        elif view.active_line == i:
            marker = " // [executed*]"
        elif i in executed:
            marker = " // [executed]"
        out.append(line + marker if line.strip() else line)
        for extra in after.get(i, []):
            out.append(extra)
    return "\n".join(out)


def _annotation_label(ann) -> str:
    """A coarse descriptor in the style of handwritten comments."""
    names = []
    for kind_value in ann.origin_kinds:
        for kind, label in _KIND_COMMENT.items():
            if kind.value == kind_value and label not in names:
                names.append(label)
    return ", ".join(names)


def cmd_render(args) -> int:
    unit = _load(args.file)
    settings = StrategySettings(max_rule_apps=args.max_steps)
    tree = verify_method(unit, args.method, settings)
    if tree.is_closed():
        print("all goals closed")
        return 0
    goals = tree.open_goals()
    index = args.goal if args.goal is not None else 0
    if index < 0 or index >= len(goals):
        print(f"no open goal {index}; {len(goals)} open", file=sys.stderr)
        return 2
    goal = goals[index]
    try:
        view = goal_view(goal.id, goal.sequent, goal.info, tree.po,
                         goal.label_path())
    except NotRenderable as e:
        print(f"goal {goal.id} not renderable: {e.reason}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(view.to_json(), indent=2))
    else:
        print(f"// goal {goal.id}: {' / '.join(view.branch_label_path)}")
        print(render_view_text(unit, view))
    return 1


def cmd_replay(args) -> int:
    unit = _load(args.file)
    text = Path(args.script).read_text()
    script = parse_script(text)
    if not script.target_method:
        print("script file must name its target: target \"method\";",
              file=sys.stderr)
        return 2
    settings = StrategySettings(max_rule_apps=args.max_steps)
    po = generate_po(unit, script.target_method)
    tree = ProofTree(po)
    if script.target_branch:
        # branch targets only exist after automation materializes them
        run_macro(tree, None, settings)
        goal_id = None
        for goal in tree.open_goals():
            path = goal.label_path()
            if list(script.target_branch) == path[-len(script.target_branch):]:
                goal_id = goal.id
                break
        if goal_id is None:
            print(f"no open goal on branch {list(script.target_branch)}",
                  file=sys.stderr)
            return 2
    else:
        goal_id = 0
    result = replay(script, tree, goal_id, settings)
    print(f"replay: {result.status}")
    for cmd, goals in result.trace:
        print(f"  {cmd} -> goals {goals}")
    if result.error:
        print(f"error: {result.error}", file=sys.stderr)
        return 2
    return 0 if tree.is_closed() else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .session.api import create_app

    webui = Path(__file__).resolve().parent.parent.parent / "webui" / "dist"
    app = create_app(webui if webui.exists() else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mjverify",
        description="Deductive verifier with source-level proof interaction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="prove method contracts")
    p.add_argument("file")
    p.add_argument("--method", help="verify a single method")
    p.add_argument("--max-steps", type=int, default=10000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="render an open goal as annotated source")
    p.add_argument("file")
    p.add_argument("--method", required=True)
    p.add_argument("--goal", type=int, default=None,
                   help="index into the open goal list")
    p.add_argument("--max-steps", type=int, default=10000)
    p.add_argument("--json", action="store_true",
                   help="print the goal view as JSON")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("replay", help="replay a proof script file")
    p.add_argument("file")
    p.add_argument("script")
    p.add_argument("--max-steps", type=int, default=10000)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the HTTP API and web UI")
    p.add_argument("--port", type=int, default=8037)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FrontendError as e:
        for d in e.diagnostics:
            print(str(d), file=sys.stderr)
        return 2
    except (PogenError, ScriptError, CalculusError) as e:
        print(str(e), file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(str(e), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
