"""Strategy: macros, determinism, confinement, and the decision procedure."""

import random

import pytest
from conftest import fixture_unit, prove

from mjverify.calculus import find_modality
from mjverify.logic import (
    AND, EQ, GT, INT, NOT, OR, IMP,
    OpKind, Sequent, int_lit, mk_compare, mk_term, program_var, pv_term,
)
from mjverify.pogen import generate_po
from mjverify.session.tree import ProofTree
from mjverify.strategy import (
    MACRO_RULES, PRIORITY, MacroKind, StrategySettings, decide_linear_int,
    run_macro,
)


def iv(name):
    return pv_term(program_var(name, INT))


class TestDecideLinearInt:
    def test_paper_example(self):
        n = iv("n")
        seq = Sequent(
            [mk_compare(">=", n, int_lit(0))],
            [mk_compare(">", mk_term(AND, (n, n)) if False else n, int_lit(-1))],
        )
        # n >= 0 |- n + 1 > 0, normalized
        seq = Sequent(
            [mk_compare(">=", n, int_lit(0))],
            [mk_compare(">", _plus(n, 1), int_lit(0))],
        )
        assert decide_linear_int(seq) == "Valid"

    def test_invalid_not_closed(self):
        x = iv("x")
        seq = Sequent([], [mk_compare(">", x, x)])
        assert decide_linear_int(seq) == "Unknown"

    def test_equalities(self):
        x, y = iv("x"), iv("y")
        seq = Sequent(
            [mk_term(EQ, (x, _plus(y, 8)))],
            [mk_compare(">", x, y)],
        )
        assert decide_linear_int(seq) == "Valid"

    def test_disequality_split(self):
        x, y = iv("x"), iv("y")
        # x <= y, x != y |- x < y  needs the integer disequality split
        seq = Sequent(
            [mk_compare("<=", x, y), mk_term(NOT, (mk_term(EQ, (x, y)),))],
            [mk_compare("<", x, y)],
        )
        assert decide_linear_int(seq) == "Valid"

    def test_integer_tightening(self):
        x = iv("x")
        seq = Sequent(
            [mk_compare("<", x, int_lit(1)), mk_compare(">", x, int_lit(-1))],
            [mk_term(EQ, (x, int_lit(0)))],
        )
        assert decide_linear_int(seq) == "Valid"

    def test_soundness_against_brute_force(self):
        """Never Valid when a counterexample exists (the hard property)."""
        rng = random.Random(42)
        names = ["x", "y", "z"]
        vars_ = [iv(n) for n in names]
        false_valids = 0
        valids = 0
        for i in range(1000):
            formulas = []
            for _ in range(rng.randint(1, 4)):
                coeffs = [rng.randint(-4, 4) for _ in names]
                const = rng.randint(-6, 6)
                lhs = int_lit(0)
                for c, v in zip(coeffs, vars_):
                    lhs = _plus_t(lhs, mk_term_mul(c, v))
                op = rng.choice(["<", "<=", ">", ">=", "=="])
                rhs = int_lit(const)
                if op == "==":
                    formulas.append(mk_term(EQ, (_norm(lhs), rhs)))
                else:
                    formulas.append(mk_compare(op, lhs, rhs))
            if rng.random() < 0.35 and formulas:
                # an entailed weakening: ante phi |- phi minus a slack bound
                target = formulas[0]
                if target.op == GT:
                    slack = rng.randint(0, 5)
                    weakened = mk_term(
                        GT, (target.children[0],
                             int_lit(target.children[1].op.payload - slack)),
                    )
                    seq = Sequent(formulas, [weakened])
                else:
                    seq = Sequent(formulas, [target])
            else:
                split = rng.randint(0, len(formulas))
                seq = Sequent(formulas[:split], formulas[split:])
            verdict = decide_linear_int(seq)
            if verdict == "Valid":
                valids += 1
                # brute force only audits claimed validity: the property is
                # one-directional soundness, never completeness
                if not _brute_force_valid(seq, names, rng):
                    false_valids += 1
        assert false_valids == 0
        assert valids > 100  # the procedure is not vacuously silent

    def test_nonlinear_is_unknown_not_unsound(self):
        x = iv("x")
        sq = mk_term_mul_t(x, x)
        seq = Sequent([], [mk_compare(">=", sq, int_lit(0))])
        # true over the integers but nonlinear: Unknown is acceptable, Valid
        # would require treating x*x as an opaque atom, which cannot prove it
        assert decide_linear_int(seq) == "Unknown"


def _plus(t, k):
    from mjverify.logic import ADD, simplify

    return simplify(mk_term(ADD, (t, int_lit(k))))


def _plus_t(a, b):
    from mjverify.logic import ADD, simplify

    return simplify(mk_term(ADD, (a, b)))


def mk_term_mul(c, v):
    from mjverify.logic import MUL, simplify

    return simplify(mk_term(MUL, (int_lit(c), v)))


def mk_term_mul_t(a, b):
    from mjverify.logic import MUL, simplify

    return simplify(mk_term(MUL, (a, b)))


def _norm(t):
    from mjverify.logic import norm_int

    return norm_int(t)


def _brute_force_valid(seq, names, rng, lo=-10, hi=10):
    """Exhaustive evaluation over the integer grid, vectorized."""
    import numpy as np

    from mjverify.logic import poly_of

    grid = np.arange(lo, hi + 1)
    vx, vy, vz = np.meshgrid(grid, grid, grid, indexing="ij")
    values = {"x": vx, "y": vy, "z": vz}

    def poly_value(monos, const):
        total = np.full(vx.shape, const, dtype=np.int64)
        for mono, coeff in monos.items():
            term = np.full(vx.shape, coeff, dtype=np.int64)
            for _, atom in mono:
                term = term * values[atom.op.name]
            total = total + term
        return total

    def eval_formula(f):
        from mjverify.logic import FALSE, TRUE

        if f == TRUE:
            return np.ones(vx.shape, dtype=bool)
        if f == FALSE:
            return np.zeros(vx.shape, dtype=bool)
        if f.op == GT:
            lm, lk = poly_of(f.children[0])
            rm, rk = poly_of(f.children[1])
            assert not rm
            return poly_value(lm, lk) > rk
        if f.op == EQ:
            lm, lk = poly_of(f.children[0])
            rm, rk = poly_of(f.children[1])
            merged = dict(lm)
            for mono, coeff in rm.items():
                merged[mono] = merged.get(mono, 0) - coeff
            return poly_value(merged, lk - rk) == 0
        raise AssertionError(f"unexpected formula {f!r}")

    ante = np.ones(vx.shape, dtype=bool)
    for f in seq.antecedent:
        ante &= eval_formula(f)
    succ = np.zeros(vx.shape, dtype=bool)
    for f in seq.succedent:
        succ |= eval_formula(f)
    return bool(np.all(~ante | succ))


class TestMacros:
    def test_listing2_full_auto_closes(self, listing2):
        tree = prove(listing2, "m")
        assert tree.is_closed()

    def test_trivial_goal_one_step(self, listing2):
        po = generate_po(listing2, "m")
        tree = ProofTree(po)
        from mjverify.logic import TRUE

        tree.nodes[0].sequent = Sequent([], [TRUE])
        res = run_macro(tree, None, StrategySettings())
        assert tree.is_closed()
        assert res.rule_apps_used <= 1

    def test_listing3_leaves_bounds_goal(self, listing3):
        tree = prove(listing3, "zero")
        assert not tree.is_closed()
        paths = [g.label_path() for g in tree.open_goals()]
        assert any("Index In Bounds" in p for p in paths)

    def test_se_only_postcondition(self, listing3):
        """Symbolic execution complete => no modalities or updates remain."""
        po = generate_po(listing3, "zero")
        tree = ProofTree(po)
        run_macro(tree, None, StrategySettings(macro=MacroKind.SYMBOLIC_EXECUTION_ONLY))
        for goal in tree.open_goals():
            assert find_modality(goal.sequent) is None
            for f in goal.sequent.antecedent + goal.sequent.succedent:
                for t in f.subterms():
                    assert t.op.kind not in (OpKind.MODALITY, OpKind.UPDATE)

    def test_determinism(self, listing3):
        shapes = []
        for _ in range(2):
            tree = prove(listing3, "zero")
            shapes.append(tree.shape())
        assert shapes[0] == shapes[1]

    def test_budget_exhaustion_reported(self, listing3):
        po = generate_po(listing3, "zero")
        tree = ProofTree(po)
        res = run_macro(tree, None, StrategySettings(max_rule_apps=5))
        assert res.budget_exhausted
        assert res.rule_apps_used == 5

    def test_macro_confinement(self):
        """SymbolicExecutionOnly never cuts, instantiates, or splits arithmetic."""
        forbidden = {"cut", "allLeft", "exRight", "splitIf", "arithClose",
                     "selectOfStoreSplit", "selectOfAnonSplit"}
        assert not (set(MACRO_RULES[MacroKind.SYMBOLIC_EXECUTION_ONLY]) & forbidden)
        assert not (set(MACRO_RULES[MacroKind.PROPOSITIONAL_ONLY]) & forbidden)

    def test_cancellation_leaves_consistent_tree(self, listing3):
        po = generate_po(listing3, "zero")
        tree = ProofTree(po)
        count = [0]

        def stop():
            count[0] += 1
            return count[0] > 12

        res = run_macro(tree, None, StrategySettings(), should_stop=stop)
        assert res.cancelled
        # tree must be at the state of the last completed application
        assert len(tree.log) == res.rule_apps_used
        for goal in tree.open_goals():
            assert goal.is_open_goal()

    def test_priority_table_golden(self):
        golden = (
            "closeFalse closeTrue close trueLeft falseRight expandEntry "
            "seBlock seLocalDecl seAssign seReturn assumeStmt assertStmt "
            "ifElseSplit methodContract loopInvariant emptyModality andLeft "
            "impRight notLeft notRight orRight eqClose selectOfStoreSame "
            "selectOfStoreDistinct selectOfAnonIn selectOfAnonOut arrIdxArr "
            "isArrIdxEval fieldEq inSetExpand selectOfAnonOutCond arithClose "
            "selectOfStoreSplit selectOfAnonSplit splitIf orLeft impLeft "
            "andRight allRight exLeft"
        ).split()
        assert list(PRIORITY) == golden
