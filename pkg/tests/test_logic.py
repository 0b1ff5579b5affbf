"""Logic core: sorts, terms, origins, normalization, updates, sequents."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from mjverify.frontend.ast import Span
from mjverify.logic import (
    ADD, AND, ARR, BOOL, EQ, FALSE, GT, HEAP, INT, MUL, NOT, OR, SELECT,
    STORE, TRUE,
    EMPTY_UPDATE, OpKind, OriginKind, OriginRef, Sequent, SortError, Term,
    Update, apply_update, class_sort, field_const, int_lit, mk_compare,
    mk_term, negate_formula, origin_of, program_var, pv_term, simplify,
    term_to_str, top_conjuncts,
)

SPAN = Span("f.mjava", 2, 12, 2, 19)


def iv(name):
    return pv_term(program_var(name, INT))


class TestMkTerm:
    def test_comparison_normalizes(self):
        # `0 <= to` becomes the internal term to > -1
        to = iv("to")
        t = mk_compare("<=", int_lit(0), to)
        assert t.op == GT
        assert t.children[0] == to
        assert t.children[1] == int_lit(-1)

    def test_conjunction_of_truths(self):
        t = mk_term(AND, (TRUE, TRUE))
        assert t.sort == BOOL

    def test_select_arity_error(self):
        h = pv_term(program_var("heap", HEAP))
        self_ = pv_term(program_var("self", class_sort("C")))
        f = field_const("C::$f", INT)
        with pytest.raises(SortError):
            mk_term(SELECT, (h, self_, f, int_lit(0)))

    def test_select_sort_from_field(self):
        h = pv_term(program_var("heap", HEAP))
        self_ = pv_term(program_var("self", class_sort("C")))
        assert mk_term(SELECT, (h, self_, field_const("C::$f", INT))).sort == INT
        assert mk_term(SELECT, (h, self_, field_const("C::$b", BOOL))).sort == BOOL

    def test_store_value_sort_checked(self):
        h = pv_term(program_var("heap", HEAP))
        self_ = pv_term(program_var("self", class_sort("C")))
        f = field_const("C::$f", INT)
        with pytest.raises(SortError):
            mk_term(STORE, (h, self_, f, TRUE))

    def test_sort_soundness_random_construction(self):
        rng = random.Random(7)
        pool = [iv("x"), iv("y"), int_lit(1), TRUE,
                pv_term(program_var("heap", HEAP))]
        ops = [ADD, MUL, AND, OR, NOT, EQ, GT, SELECT, STORE]
        for _ in range(400):
            op = rng.choice(ops)
            arity = rng.randint(0, 4)
            kids = tuple(rng.choice(pool) for _ in range(arity))
            try:
                t = mk_term(op, kids)
            except SortError:
                continue
            assert t.sort is not None
            pool.append(t)


class TestOrigins:
    def test_own_origins_win(self):
        o = OriginRef(OriginKind.REQUIRES, "f.mjava", SPAN)
        t = mk_compare("<=", int_lit(0), iv("to")).with_origins({o})
        assert origin_of(t) == frozenset({o})

    def test_origin_free_literal(self):
        assert origin_of(int_lit(0)) == frozenset()

    def test_recursive_union(self):
        o1 = OriginRef(OriginKind.REQUIRES, "f.mjava", SPAN)
        o2 = OriginRef(OriginKind.LOOP_GUARD, "f.mjava",
                       Span("f.mjava", 5, 1, 5, 9))
        a = mk_compare("<", iv("x"), iv("y")).with_origins({o1})
        b = mk_compare("<", iv("y"), iv("z")).with_origins({o2})
        conj = mk_term(AND, (a, b))
        assert origin_of(conj) == frozenset({o1, o2})

    def test_recursive_union_random_trees(self):
        # oracle: collect all origins painted on leaves; origin_of on an
        # unlabeled spine must equal their union
        rng = random.Random(13)
        for _ in range(100):
            leaves = []
            expected = set()
            for i in range(rng.randint(1, 6)):
                org = OriginRef(
                    OriginKind.REQUIRES, "f.mjava",
                    Span("f.mjava", i + 1, 1, i + 1, 5), occurrence=i
                )
                expected.add(org)
                leaves.append(
                    mk_compare("<", iv(f"v{i}"), int_lit(i)).with_origins({org})
                )
            t = leaves[0]
            for leaf in leaves[1:]:
                t = mk_term(rng.choice([AND, OR]), (t, leaf))
            assert origin_of(t) == frozenset(expected)

    def test_structural_equality_ignores_origins(self):
        o = OriginRef(OriginKind.REQUIRES, "f.mjava", SPAN)
        t1 = mk_compare("<=", int_lit(0), iv("to"))
        t2 = t1.with_origins({o})
        assert t1 == t2
        assert hash(t1) == hash(t2)

    def test_implicit_origin_has_no_span(self):
        with pytest.raises(ValueError):
            OriginRef(OriginKind.IMPLICIT, "f.mjava", SPAN)
        with pytest.raises(ValueError):
            OriginRef(OriginKind.USER_INTERACTION, span=SPAN)


class TestUpdates:
    def test_increment_example(self):
        n = iv("n")
        u = EMPTY_UPDATE.extended(n.op, simplify(mk_term(ADD, (n, int_lit(1)))))
        out = apply_update(u, mk_compare(">", n, int_lit(0)))
        assert out == mk_compare(">", mk_term(ADD, (n, int_lit(1))), int_lit(0))

    def test_parallel_swap_is_simultaneous(self):
        x, y = iv("x"), iv("y")
        u = Update([(x.op, y), (y.op, x)])
        assert apply_update(u, mk_term(EQ, (x, y))) == mk_term(EQ, (y, x))

    def test_empty_update_identity(self):
        f = mk_compare(">", iv("n"), int_lit(0))
        assert apply_update(EMPTY_UPDATE, f) == f

    def test_last_wins(self):
        x = iv("x")
        u = Update([(x.op, int_lit(1)), (x.op, int_lit(2))])
        assert apply_update(u, x) == int_lit(2)

    def test_update_below_modality_rejected(self):
        from mjverify.logic import ModProgram, diamond

        x = iv("x")
        mod = diamond(ModProgram(()), TRUE)
        with pytest.raises(ValueError):
            apply_update(Update([(x.op, int_lit(1))]), mod)

    @given(st.integers(-50, 50), st.integers(-50, 50))
    @settings(max_examples=60, deadline=None)
    def test_idempotent_variable_only_updates(self, a, b):
        x, y = iv("x"), iv("y")
        u = Update([(x.op, y)])
        t = simplify(mk_term(ADD, (mk_term(MUL, (int_lit(a), x)), int_lit(b))))
        once = apply_update(u, t)
        twice = apply_update(u, once)
        assert once == twice


class TestNormalization:
    def test_negate_guard(self):
        j, to = iv("j"), iv("to")
        guard = mk_compare("<", j, to)
        neg = negate_formula(guard)
        # not(j < to)  <=>  j >= to  <=>  j - to > -1
        assert neg.op == GT
        assert negate_formula(neg) == guard

    def test_constant_comparisons_collapse(self):
        assert mk_compare("<", int_lit(1), int_lit(2)) == TRUE
        assert mk_compare("<", int_lit(2), int_lit(1)) == FALSE

    def test_eq_same_collapses(self):
        x = iv("x")
        assert simplify(mk_term(EQ, (x, x))) == TRUE

    def test_and_unit_pruning(self):
        f = mk_compare(">", iv("x"), int_lit(0))
        assert simplify(mk_term(AND, (TRUE, f))) == f
        assert simplify(mk_term(AND, (f, FALSE))) == FALSE

    @given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9))
    @settings(max_examples=80, deadline=None)
    def test_normalization_agrees_with_evaluation(self, cx, cy, k):
        """Normalized comparisons evaluate like their raw forms."""
        x, y = iv("x"), iv("y")
        lhs = mk_term(ADD, (mk_term(MUL, (int_lit(cx), x)), int_lit(k)))
        rhs = mk_term(MUL, (int_lit(cy), y))
        normalized = mk_compare("<=", lhs, rhs)
        for vx in (-2, 0, 3):
            for vy in (-1, 0, 2):
                u = Update([(x.op, int_lit(vx)), (y.op, int_lit(vy))])
                got = apply_update(u, normalized)
                want = TRUE if cx * vx + k <= cy * vy else FALSE
                assert got == want, (cx, k, cy, vx, vy)


class TestSequent:
    def test_dedup(self):
        f = mk_compare(">", iv("x"), int_lit(0))
        s = Sequent([f, f], [f])
        assert len(s.antecedent) == 1

    def test_nonbool_rejected(self):
        with pytest.raises(ValueError):
            Sequent([iv("x")], [])

    def test_top_conjuncts_respect_origins(self):
        o = OriginRef(OriginKind.ENSURES, "f.mjava", SPAN)
        a = mk_compare(">", iv("x"), int_lit(0))
        b = mk_compare(">", iv("y"), int_lit(0))
        clause = mk_term(AND, (a, b), frozenset({o}))  # user-written &&
        glue = mk_term(AND, (clause, mk_compare(">", iv("z"), int_lit(0))))
        assert top_conjuncts(glue) == [clause, glue.children[1]]


class TestPrinting:
    def test_canonical_forms(self):
        h = pv_term(program_var("heap", HEAP))
        self_ = pv_term(program_var("self", class_sort("C")))
        f = field_const("C::$f", INT)
        sel = mk_term(SELECT, (h, self_, f))
        assert term_to_str(sel) == "select(heap, self, C::$f)"
        assert term_to_str(mk_term(EQ, (sel, int_lit(5)))) == \
            "select(heap, self, C::$f) = 5"

    def test_empty_sequent(self):
        from mjverify.logic import sequent_to_str

        assert sequent_to_str(Sequent()) == "==>"
