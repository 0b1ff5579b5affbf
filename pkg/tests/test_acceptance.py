"""Acceptance criteria A1-A12, one test per criterion.

Each test prints a `[A#] PASS` line on success (run with -s to stream them);
a failing criterion shows up as an ordinary pytest failure.
"""

import json
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest
from conftest import FIXTURES, fixture_text, fixture_unit, goal_on_branch, prove

from helpers_interp import check_contract
from helpers_progen import enumerate_inputs, gen_loop_free_method, gen_straightline_method

from mjverify.frontend import load_unit
from mjverify.logic import (
    EQ, GT, SELECT, TRUE,
    OpKind, OriginKind, int_lit, mk_term, origin_of, top_conjuncts,
)
from mjverify.pogen import generate_po
from mjverify.render import (
    build_heap_map, classify_formula, goal_view, position_annotations,
)
from mjverify.render.positioning import assert_gap, assume_gap
from mjverify.session.persistence import RestoreDivergence, persist, restore
from mjverify.session.tree import ProofTree
from mjverify.strategy import MacroKind, StrategySettings, run_macro

GOLDEN = Path(__file__).parent / "golden"


def report(criterion: str, detail: str):
    print(f"[{criterion}] PASS — {detail}")


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "mjverify.cli", *args],
        capture_output=True, text=True, timeout=600,
    )


def test_a1_listing2_end_to_end():
    out = run_cli("verify", str(FIXTURES / "listing2.mjava"), "--method", "m")
    assert out.returncode == 0, out.stderr

    unit = fixture_unit("listing2_noassume.mjava")
    tree = prove(unit, "m")
    goals = tree.open_goals()
    assert len(goals) == 1
    view = goal_view(goals[0].id, goals[0].sequent, goals[0].info, tree.po,
                     goals[0].label_path())
    asserts = [a for a in view.annotations if a.kind == "Assert"]
    assert len(asserts) == 1
    assert asserts[0].text == "n > 0"
    report("A1", "assume/assert example closes; without the assume exactly "
                 "one open goal renders Assert `n > 0`")


def test_a2_listing3_defect_detection():
    out = run_cli("verify", str(FIXTURES / "listing3.mjava"), "--method", "zero")
    assert out.returncode == 1

    unit = fixture_unit("listing3.mjava")
    tree = prove(unit, "zero")
    goal = goal_on_branch(tree, "Body Preserves Invariant", "Index In Bounds")
    view = goal_view(goal.id, goal.sequent, goal.info, tree.po, goal.label_path())
    bounds = [a for a in view.annotations if a.kind == "Assert"]
    assert len(bounds) == 1
    assert bounds[0].text == "0 <= j < a.length"
    access_line = 15  # a[j] = 0;
    assert (bounds[0].placement, bounds[0].anchor_line) == ("before", access_line)
    hover_texts = {tree.po.unit.span_text(s) for s in bounds[0].origin_spans}
    assert "a[j]" in hover_texts

    out2 = run_cli("verify", str(FIXTURES / "listing3_fixed.mjava"),
                   "--method", "zero")
    assert out2.returncode == 0, out2.stderr
    report("A2", "bounds Assert `0 <= j < a.length` above `a[j] = 0;` with "
                 "hover refs; adding `requires to <= a.length` closes the proof")


def test_a3_preserves_goal_layout_golden():
    unit = fixture_unit("listing3.mjava")
    po = generate_po(unit, "zero")
    tree = ProofTree(po)
    run_macro(tree, None, StrategySettings(macro=MacroKind.SYMBOLIC_EXECUTION_ONLY))
    goal = goal_on_branch(tree, "Body Preserves Invariant")
    view = goal_view(goal.id, goal.sequent, goal.info, po, goal.label_path())
    doc = view.to_json()

    golden = json.loads((GOLDEN / "a3_preserves_view.json").read_text())
    assert json.loads(json.dumps(doc, sort_keys=True)) == golden

    body_line, after_incr = 15, 16
    assumes = [(a["text"], a["placement"], a["anchorLine"])
               for a in doc["annotations"] if a["kind"] == "Assume"]
    assert assumes == [
        ("0 <= to", "before", body_line),
        ("j < to", "before", body_line),
        ("0 <= j <= to", "before", body_line),
        ("(\\forall int k; 0 <= k < j; a[k] == 0)", "before", body_line),
    ]
    asserts = [(a["text"], a["placement"], a["anchorLine"])
               for a in doc["annotations"] if a["kind"] == "Assert"]
    assert asserts[:2] == [
        ("0 <= j <= to", "after", after_incr),
        ("(\\forall int k; 0 <= k < j; a[k] == 0)", "after", after_incr),
    ]
    report("A3", "preserves-branch view matches the golden fixture: assumes "
                 "above the body, invariant asserts after `++j;`")


FIG4_SRC = """class C {
  int sum, max;
  void sumAndMax(int[] a) {
    sum = 0;
    max = 0;
    int k = 0; /*@ loop_invariant 0 <= sum && k <= a.length; assignable sum, max; decreases a.length - k; @*/
    while (k < a.length) {
      k++;
    }
  }
}
"""


def test_a4_heap_map():
    unit = load_unit(FIG4_SRC, "sumandmax.mjava")
    po = generate_po(unit, "sumAndMax")
    tree = ProofTree(po)
    run_macro(tree, None, StrategySettings(macro=MacroKind.SYMBOLIC_EXECUTION_ONLY))
    goal = goal_on_branch(tree, "Use Case")
    hm = build_heap_map(goal.sequent, goal.info)
    created = {
        (t.op.name, line) for t, line in hm.heap_lines.items()
        if t.op.name in ("store", "anon")
    }
    assert created == {("store", 4), ("store", 5), ("anon", 7)}
    inner = next(t for t, line in hm.heap_lines.items()
                 if t.op.name == "store" and line == 4)
    outer = next(t for t, line in hm.heap_lines.items()
                 if t.op.name == "store" and line == 5)
    anon = next(t for t in hm.heap_lines if t.op.name == "anon")
    assert outer.children[0] == inner
    locset = repr(anon.children[1])
    assert "singleton(self, C::$sum)" in locset
    assert "singleton(self, C::$max)" in locset
    report("A4", "heap map is {inner store -> 4, outer store -> 5, anon -> 7}; "
                 "anon set covers (self,sum) and (self,max)")


def test_a5_verbatim_pathway():
    unit = fixture_unit("listing3.mjava")
    tree = prove(unit, "zero")
    goal = goal_on_branch(tree, "Body Preserves Invariant", "Index In Bounds")
    requires = [
        t for t in goal.sequent.antecedent
        if OriginKind.REQUIRES in {o.kind for o in origin_of(t)}
    ]
    assert len(requires) == 1
    # the internal normalization `0 <= to` -> `to > -1` has happened
    internal = requires[0]
    assert internal.op == GT
    assert internal.children[1] == int_lit(-1)
    assert internal.children[0].op.name == "to"

    view = goal_view(goal.id, goal.sequent, goal.info, tree.po, [])
    ann = [a for a in view.annotations
           if a.sequent_ref == {"side": "ante",
                                "index": goal.sequent.antecedent.index(internal),
                                "conjunct": 0}]
    assert len(ann) == 1
    assert ann[0].status == "Verbatim"
    span = ann[0].origin_spans[0]
    assert ann[0].text == tree.po.unit.span_text(span) == "0 <= to"
    report("A5", "internal term is `to > -1`, rendered text is byte-identical "
                 "`0 <= to`")


def test_a6_listing4_old_semantics():
    tree = prove(fixture_unit("listing4.mjava"), "inc")
    assert tree.is_closed()

    src = fixture_text("listing4.mjava").replace("    a[i] = a[i] + 1;\n", "")
    unit = load_unit(src, "listing4_noinc.mjava")
    tree2 = prove(unit, "inc")
    assert not tree2.is_closed()
    open_paths = [g.label_path() for g in tree2.open_goals()]
    # the label-form assertion (checked first) holds; the plain-old one opens
    assert all("Assert Holds" in p for p in open_paths), open_paths
    report("A6", "label-form \\old verifies via the callee contract; plain "
                 "\\old verifies via the increment and opens without it")


def _random_labeled_formula(rng, depth=2):
    from mjverify.frontend.ast import Span
    from mjverify.logic import (
        AND, HEAP, IMP, INT, NOT, OR, OriginRef, STORE, Term, class_sort,
        field_const, mk_compare, program_var, pv_term,
    )

    pvs = [pv_term(program_var(n, INT)) for n in ("x", "y", "z")]
    heap = pv_term(program_var("heap", HEAP))
    obj = pv_term(program_var("o", class_sort("C")))
    obj2 = pv_term(program_var("p", class_sort("C")))
    fld = field_const("C::$f", INT)

    def origin():
        if rng.random() < 0.3:
            return frozenset()
        kind = rng.choice([
            OriginKind.REQUIRES, OriginKind.ENSURES, OriginKind.ASSUME,
            OriginKind.ASSERT, OriginKind.LOOP_GUARD,
        ])
        line = rng.randint(1, 30)
        col = rng.randint(1, 20)
        return frozenset({OriginRef(
            kind, "random.mjava",
            Span("random.mjava", line, col, line, col + rng.randint(1, 9)),
            rng.randint(0, 2),
        )})

    def intterm(d):
        if d <= 0 or rng.random() < 0.4:
            if rng.random() < 0.3:
                which = rng.choice([obj, obj2])
                store = mk_term(
                    STORE, (heap, obj, fld, int_lit(rng.randint(-3, 3)))
                ).with_origins(origin())
                return mk_term(SELECT, (store, which, fld), origin())
            return rng.choice(pvs + [int_lit(rng.randint(-4, 4))]).with_origins(origin())
        from mjverify.logic import ADD

        return mk_term(ADD, (intterm(d - 1), intterm(d - 1)), origin())

    def formula(d):
        if d <= 0 or rng.random() < 0.4:
            op = rng.choice(["<", "<=", ">", ">="])
            return mk_compare(op, intterm(1), intterm(1), origin())
        k = rng.random()
        if k < 0.3:
            return mk_term(AND, (formula(d - 1), formula(d - 1)), origin())
        if k < 0.5:
            return mk_term(OR, (formula(d - 1), formula(d - 1)), origin())
        if k < 0.7:
            return mk_term(IMP, (formula(d - 1), formula(d - 1)), origin())
        if k < 0.85:
            return mk_term(NOT, (formula(d - 1),), origin())
        return mk_term(EQ, (intterm(1), intterm(1)), origin())

    return formula(depth)


def test_a7_origin_propagation_properties():
    from mjverify.calculus import (
        FreshNames, GoalState, NodeInfo, RuleApplication, applicable_rules,
        apply_rule, enumerate_foci, resolve_focus,
    )
    from mjverify.calculus.rules import RuleCategory, get_rule
    from mjverify.logic import Sequent, simplify

    rng = random.Random(4711)
    applications = 0
    attempts = 0
    while applications < 500 and attempts < 3000:
        attempts += 1
        n_ante = rng.randint(0, 2)
        n_succ = rng.randint(1, 2)
        try:
            seq = Sequent(
                [simplify(_random_labeled_formula(rng)) for _ in range(n_ante)],
                [simplify(_random_labeled_formula(rng)) for _ in range(n_succ)],
            )
        except Exception:
            continue
        goal = GoalState(seq, NodeInfo(entry_line=1), None)
        candidates = []
        for focus in enumerate_foci(seq):
            for rule in applicable_rules(goal, focus):
                if rule.id in ("cut", "allLeft", "exRight", "arithClose",
                               "hideLeft", "hideRight"):
                    continue
                candidates.append((rule, focus))
        if not candidates:
            continue
        rule, focus = rng.choice(candidates)
        old_focus_term = resolve_focus(seq, focus)
        parent_spans = {
            o for f in seq.antecedent + seq.succedent
            for t in f.subterms() for o in t.origins if o.span is not None
        }
        try:
            children = apply_rule(goal, RuleApplication(rule.id, focus), FreshNames())
        except Exception:
            continue
        applications += 1

        for child in children:
            child_spans = {
                o for f in child.sequent.antecedent + child.sequent.succedent
                for t in f.subterms() for o in t.origins if o.span is not None
            }
            # (a) no fabricated provenance
            assert child_spans <= parent_spans, rule.id

        if rule.category is RuleCategory.PURE_REWRITE and children:
            # (b) non-accumulation: pure rewrites transfer or keep origin
            # sets, so no single operator's set may grow past the parent's
            # largest; only conditional rewrites union origins
            child = children[0]
            side = child.sequent.side(focus.side)
            if focus.index < len(side):
                parent_formula = seq.side(focus.side)[focus.index]
                parent_max = max(
                    (len(t.origins) for t in parent_formula.subterms()),
                    default=0,
                )
                child_max = max(
                    (len(t.origins) for t in side[focus.index].subterms()),
                    default=0,
                )
                assert child_max <= parent_max, rule.id

    assert applications == 500

    # (c) implicit-only formulas never render, checked on a real goal view
    unit = fixture_unit("listing3.mjava")
    tree = prove(unit, "zero")
    for goal_node in tree.open_goals():
        view = goal_view(goal_node.id, goal_node.sequent, goal_node.info,
                         tree.po, [])
        for ann in view.annotations:
            side = ann.sequent_ref["side"]
            formula = goal_node.sequent.side(side)[ann.sequent_ref["index"]]
            conj = top_conjuncts(formula)[ann.sequent_ref["conjunct"]]
            kinds = {o.kind for o in origin_of(conj)}
            assert not (kinds and kinds <= {OriginKind.IMPLICIT})
    report("A7", "500 randomized applications: origins never invented, pure "
                 "rewrites never accumulate, implicit formulas never render")


def test_a8_positioning_oracle():
    from test_render import _select_eq, oracle_assert, oracle_assume

    rng = random.Random(8080)
    programs = 0
    checked = 0
    while programs < 200:
        src = gen_straightline_method(rng, max_stmts=10, max_heap_writes=3)
        unit = load_unit(src, f"gen{programs}.mjava")
        tree = ProofTree(generate_po(unit, "m"))
        run_macro(tree, None, StrategySettings(macro=MacroKind.SYMBOLIC_EXECUTION_ONLY))
        goal = tree.open_goals()[0]
        programs += 1
        heaps = sorted(
            {t for f in goal.sequent.antecedent + goal.sequent.succedent
             for t in f.subterms() if t.sort.kind == "heap"},
            key=repr,
        )
        for h in heaps:
            for _ in range(2):
                formula = _select_eq(h, tree, rng)
                info = goal.info.record_formulas([formula], gap=0)
                assert assume_gap(formula, 0, info) == oracle_assume(formula, info)
                assert assert_gap(formula, 0, info) == oracle_assert(formula, info)
                checked += 1
    assert checked >= 400
    report("A8", f"positioning matches the shift-condition oracle on "
                 f"{programs} programs / {checked} formulas")


def test_a9_soundness_sampling():
    rng = random.Random(31337)
    t0 = time.time()
    closed = 0
    checked_inputs = 0
    for i in range(100):
        src = gen_loop_free_method(rng)
        unit = load_unit(src, f"sound{i}.mjava")
        tree = prove(unit, "m", max_steps=4000)
        if not tree.is_closed():
            continue
        closed += 1
        has_array = "int[] arr" in src
        for args, arrays in enumerate_inputs(has_array):
            verdict = check_contract(unit, "m", args, arrays, {"f": 0})
            checked_inputs += 1
            assert not verdict.startswith("violated"), (
                f"UNSOUND CLOSURE:\n{src}\ninputs={args} arrays={arrays}: {verdict}"
            )
    elapsed = time.time() - t0
    assert elapsed <= 60, f"soundness sampling took {elapsed:.1f}s"
    assert closed >= 20, f"only {closed} proofs closed; sampling too weak"
    report("A9", f"{closed}/100 proofs closed, {checked_inputs} concrete "
                 f"executions, zero unsound closures, {elapsed:.1f}s")


def test_a10_script_fixpoint():
    from test_script import LISTING5_SCRIPT, _interactive_session

    from mjverify.script import parse_script, record, replay

    script = parse_script(LISTING5_SCRIPT)
    assert [c.name for c in script.commands] == \
        ["expand", "witness", "instantiate", "auto"]

    rng = random.Random(515)
    rounds = 0
    attempts = 0
    while rounds < 50 and attempts < 150:
        attempts += 1
        session_rng = random.Random(rng.randint(0, 10**9))
        tree = ProofTree(generate_po(fixture_unit("listing3.mjava"), "zero"))
        log = _interactive_session(tree, session_rng)
        if not log:
            continue
        text = record(log, tree, 0)
        original = [(e.descriptor["rule"], e.node_id) for e in tree.log]
        tree2 = ProofTree(generate_po(fixture_unit("listing3.mjava"), "zero"))
        inner = text.removeprefix("\\by {").removesuffix("}")
        result = replay(parse_script(inner), tree2, 0)
        assert result.error is None, (text, result.error)
        replayed = [(e.descriptor["rule"], e.node_id) for e in tree2.log]
        assert replayed == original, text
        assert tree2.shape() == tree.shape()
        rounds += 1
    assert rounds >= 50
    report("A10", "Listing-5-style script parses; 50 recorded sessions replay "
                  "to identical proof trees")


def test_a11_persistence():
    unit = fixture_unit("listing3.mjava")
    po = generate_po(unit, "zero")
    tree = ProofTree(po)
    run_macro(tree, None, StrategySettings(max_rule_apps=45))  # half-finished
    assert not tree.is_closed() and tree.log
    doc = persist(tree)
    tree2, changed = restore(doc, unit)
    assert not changed
    assert tree2.shape() == tree.shape()
    assert [n.id for n in tree2.open_goals()] == [n.id for n in tree.open_goals()]

    edited = load_unit(
        fixture_text("listing3.mjava").replace("0 <= to", "0 < to"),
        "listing3.mjava",
    )
    with pytest.raises(RestoreDivergence) as exc:
        restore(doc, edited)
    assert exc.value.step >= 0
    assert exc.value.source_changed
    report("A11", f"half-finished proof round-trips identically; edited source "
                  f"reports divergence at step {exc.value.step}")


def test_a12_untranslatable_fallback():
    unit = fixture_unit("listing3.mjava")
    po = generate_po(unit, "zero")
    tree = ProofTree(po)
    run_macro(tree, None, StrategySettings(macro=MacroKind.SYMBOLIC_EXECUTION_ONLY))
    # split the use-case postcondition to isolate the frame-proof branch
    from mjverify.script import parse_script, replay

    use = goal_on_branch(tree, "Use Case")
    replay(parse_script("split;"), tree, use.id)
    frame_goal = None
    for g in tree.open_goals():
        for f in g.sequent.succedent:
            kinds = {o.kind for o in origin_of(f)}
            if kinds == {OriginKind.ASSIGNABLE}:
                frame_goal = g
        if frame_goal:
            break
    assert frame_goal is not None
    view = goal_view(frame_goal.id, frame_goal.sequent, frame_goal.info,
                     tree.po, frame_goal.label_path())
    frame_anns = [a for a in view.annotations if a.status == "Untranslatable"]
    assert frame_anns, "frame obligation must render an annotation"
    assert all(a.message for a in frame_anns)
    assert any("fields" in a.message for a in frame_anns)
    assert "==>" in view.sequent_fallback
    assert "inSet" in view.sequent_fallback  # the fallback shows the formula
    report("A12", "frame-proof branch renders Untranslatable with message "
                  f"{frame_anns[0].message!r} plus the sequent fallback")
