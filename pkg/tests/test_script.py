"""Proof scripts: grammar, replay semantics, record/replay fixpoint."""

import random

import pytest
from conftest import fixture_unit, goal_on_branch, prove

from mjverify.frontend import load_unit
from mjverify.pogen import generate_po
from mjverify.script import (
    Command, Script, ScriptError, parse_script, record, replay,
)
from mjverify.session.tree import ProofTree
from mjverify.strategy import MacroKind, StrategySettings, run_macro

LISTING5_SCRIPT = """
  expand on="\\invariant_for(this)";
  witness "(\\exists int j; 0<=j<a.length; a[j]>1)"
      as="j_0";
  instantiate "(\\exists int i; 0<=i<a.length; a[i]>0)"
      inst="j_0";
  auto;
"""

LISTING5_SOURCE = """class Holder {
  int[] a;
  //@ invariant (\\exists int j; 0<=j<a.length; a[j]>1);

  /*@ public normal_behavior
    @ requires \\invariant_for(this);
    @ ensures true;
    @ assignable \\nothing;
    @*/
  void check() {
    //@ assert (\\exists int i; 0<=i<a.length; a[i]>0);
    return;
  }
}
"""


class TestParseScript:
    def test_listing5_shape(self):
        script = parse_script(LISTING5_SCRIPT)
        assert [c.name for c in script.commands] == \
            ["expand", "witness", "instantiate", "auto"]
        assert script.commands[0].opt("on") == "\\invariant_for(this)"
        assert script.commands[1].positional == \
            ("(\\exists int j; 0<=j<a.length; a[j]>1)",)
        assert script.commands[1].opt("as") == "j_0"
        assert script.commands[2].opt("inst") == "j_0"

    def test_single_auto(self):
        script = parse_script(" auto; ")
        assert [c.name for c in script.commands] == ["auto"]

    def test_misspelled_command_with_position(self):
        with pytest.raises(ScriptError) as exc:
            parse_script('\n witnes "x";')
        assert exc.value.line == 2

    def test_missing_semicolon(self):
        with pytest.raises(ScriptError, match=";"):
            parse_script('auto')

    def test_continuation_markers_stripped(self):
        script = parse_script("auto;\n  @ macro \"PropositionalOnly\";")
        assert [c.name for c in script.commands] == ["auto", "macro"]


class TestReplay:
    def test_listing5_full_interaction(self):
        unit = load_unit(LISTING5_SOURCE, "listing5.mjava")
        po = generate_po(unit, "check")
        tree = ProofTree(po)
        run_macro(tree, None, StrategySettings(macro=MacroKind.FULL_AUTO))
        assert not tree.is_closed()
        goal = goal_on_branch(tree, "Assert Valid")
        result = replay(parse_script(LISTING5_SCRIPT), tree, goal.id)
        assert result.error is None
        assert result.status == "Closed"
        assert tree.is_closed()

    def test_auto_closes_listing2(self, listing2):
        po = generate_po(listing2, "m")
        tree = ProofTree(po)
        result = replay(parse_script("auto;"), tree, 0)
        assert result.status == "Closed"

    def test_cut_then_auto(self):
        """A goal closable only after the case split closes both branches.

        The precondition `2*y == 2*x + 1` is unsatisfiable over the integers
        but satisfiable over the rationals, so Fourier-Motzkin alone cannot
        refute it; the case split `y <= x` makes both branches linear-closable.
        """
        unit = load_unit(
            "class C {\n"
            "  /*@ requires 2 * y == 2 * x + 1;\n"
            "    @ ensures true;\n"
            "    @ assignable \\nothing;\n"
            "    @*/\n"
            "  void m(int x, int y) {\n"
            "    //@ assert false;\n"
            "  }\n}", "cut.mjava"
        )
        po = generate_po(unit, "m")
        plain = ProofTree(po)
        run_macro(plain, None, StrategySettings())
        assert not plain.is_closed()  # closable only after the case split
        tree = ProofTree(po)
        result = replay(parse_script('auto; cut "y <= x"; auto; auto;'), tree, 0)
        assert result.error is None
        assert result.status == "Closed"
        rules = [e.descriptor["rule"] for e in tree.log]
        assert "cut" in rules
        cut_entry = [e for e in tree.log if e.descriptor["rule"] == "cut"][0]
        labels = [tree.nodes[c].branch_label for c in cut_entry.child_ids
                  if c in tree.nodes]
        assert labels == ["Cut True", "Cut False"]

    def test_hide_drops_assume(self, listing3):
        tree = prove(listing3, "zero")
        goal = goal_on_branch(tree, "Body Preserves Invariant", "Index In Bounds")
        from mjverify.render import goal_view

        view = goal_view(goal.id, goal.sequent, goal.info, tree.po, [])
        assert any(a.text == "0 <= to" for a in view.annotations)
        result = replay(parse_script('hide "0 <= to";'), tree, goal.id)
        assert result.error is None
        new_goal = tree.open_goals()[0]
        for g in tree.open_goals():
            if g.label_path()[-2:] == ["Body Preserves Invariant", "Index In Bounds"]:
                new_goal = g
        view2 = goal_view(new_goal.id, new_goal.sequent, new_goal.info, tree.po, [])
        assert not any(a.text == "0 <= to" for a in view2.annotations)

    def test_split_separates_conjuncts(self, listing3):
        po = generate_po(listing3, "zero")
        tree = ProofTree(po)
        run_macro(tree, None, StrategySettings(macro=MacroKind.SYMBOLIC_EXECUTION_ONLY))
        goal = goal_on_branch(tree, "Body Preserves Invariant")
        before = len(tree.open_goals())
        result = replay(parse_script("split;"), tree, goal.id)
        assert result.error is None
        assert len(tree.open_goals()) == before + 1

    def test_inapplicable_command_stops_with_trace(self, listing3):
        tree = prove(listing3, "zero")
        goal = goal_on_branch(tree, "Body Preserves Invariant", "Index In Bounds")
        result = replay(
            parse_script('hide "0 <= to"; hide "no such formula text";'),
            tree, goal.id,
        )
        assert result.status == "Error"
        assert len(result.trace) == 1  # first command succeeded
        assert "no formula matches" in result.error

    def test_replay_deterministic(self, listing3):
        traces = []
        for _ in range(2):
            tree = prove(fixture_unit("listing3.mjava"), "zero")
            goal = goal_on_branch(tree, "Body Preserves Invariant", "Index In Bounds")
            result = replay(
                parse_script('hide "j < to"; macro "PropositionalOnly";'),
                tree, goal.id,
            )
            traces.append([(c, tuple(g)) for c, g in result.trace])
        assert traces[0] == traces[1]


def _interactive_session(tree, rng) -> list[tuple[int, Command]]:
    """Drive a few random source-level commands; returns the interaction log."""
    from mjverify.script import execute_command

    log = []
    settings = StrategySettings(max_rule_apps=400)
    candidates = [
        Command("macro", ("SymbolicExecutionOnly",)),
        Command("auto", ("200",)),
        Command("cut", ('j == 0',)),
        Command("cut", ('0 <= to',)),
        Command("split",),
        Command("auto",),
    ]
    for _ in range(rng.randint(1, 4)):
        goals = sorted(tree.open_goals(), key=lambda n: n.id)
        if not goals:
            break
        target = goals[0]
        cmd = rng.choice(candidates)
        try:
            execute_command(tree, target, cmd, settings)
        except Exception:
            continue
        log.append((target.id, cmd))
    return log


class TestRecordReplayFixpoint:
    def test_simple_macro_log(self, listing2):
        tree = prove(listing2, "m", macro=MacroKind.SYMBOLIC_EXECUTION_ONLY)
        text = record([(0, Command("auto"))], tree, 0)
        assert text == "\\by {\n  auto;\n}"

    def test_record_replay_roundtrip_sessions(self, listing3):
        """Recorded sessions replay to identical trees (rule id sequences)."""
        rng = random.Random(99)
        rounds = 0
        attempts = 0
        while rounds < 50 and attempts < 120:
            attempts += 1
            seed = rng.randint(0, 10**9)
            session_rng = random.Random(seed)
            tree = ProofTree(generate_po(fixture_unit("listing3.mjava"), "zero"))
            log = _interactive_session(tree, session_rng)
            if not log:
                continue
            script_text = record(log, tree, 0)
            original = [
                (e.descriptor["rule"], e.node_id) for e in tree.log
            ]
            original_shape = tree.shape()

            tree2 = ProofTree(generate_po(fixture_unit("listing3.mjava"), "zero"))
            script = parse_script(script_text.removeprefix("\\by {").removesuffix("}"))
            result = replay(script, tree2, 0)
            assert result.error is None, (script_text, result.error)
            replayed = [
                (e.descriptor["rule"], e.node_id) for e in tree2.log
            ]
            assert replayed == original, script_text
            assert tree2.shape() == original_shape
            rounds += 1
        assert rounds >= 50
