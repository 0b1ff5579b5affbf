"""Frontend: parsing, spans, shape rules, type checking."""

from pathlib import Path

import pytest
from conftest import FIXTURES, fixture_text

from mjverify.frontend import (
    ast, check_shape, parse_spec_expr, parse_unit, span_text, typecheck,
)

PAPER = FIXTURES / "paper"


def parse_ok(text, path="test.mjava"):
    result = parse_unit(text, path)
    assert not isinstance(result, list), f"diagnostics: {[str(d) for d in result]}"
    return result


class TestParseUnit:
    def test_swap_contract_clause_counts(self):
        unit = parse_ok((PAPER / "listing1.mjava").read_text(), "listing1.mjava")
        m = unit.classes[0].method("swap")
        assert len(m.contract.requires) == 1
        assert len(m.contract.ensures) == 2
        assert len(m.contract.assignable) == 1

    def test_empty_class(self):
        unit = parse_ok("class C {}")
        assert len(unit.classes) == 1
        assert unit.classes[0].methods == ()
        assert unit.classes[0].fields == ()

    def test_empty_clause_expression_rejected(self):
        result = parse_unit(
            "class C {\n  //@ requires ;\n  void m() {}\n}", "t.mjava"
        )
        assert isinstance(result, list)
        assert "empty clause expression" in result[0].message
        assert result[0].span.start_line == 2

    def test_unknown_clause_keyword(self):
        result = parse_unit(
            "class C {\n  //@ requiers 0 <= 1;\n  void m() {}\n}", "t.mjava"
        )
        assert isinstance(result, list)

    def test_all_paper_listings_parse(self):
        for name in ("listing1", "listing2", "listing3", "listing4"):
            parse_ok((PAPER / f"{name}.mjava").read_text(), f"{name}.mjava")

    def test_spec_syntax_rejected_in_code(self):
        result = parse_unit(
            "class C {\n  void m(int x) {\n    int y = \\old(x);\n  }\n}", "t.mjava"
        )
        assert isinstance(result, list)

    def test_old_forms(self):
        unit = parse_ok(fixture_text("listing4.mjava"))
        inc = unit.classes[0].method("inc")
        asserts = [s for s in inc.body if isinstance(s, ast.Assert)]
        assert len(asserts) == 2
        labeled = [
            e for s in asserts for e in _subexprs(s.expr)
            if isinstance(e, ast.Old) and e.label == "l"
        ]
        assert labeled, "label form \\old(e, l) must parse"

    def test_old_line_form_parses(self):
        expr = parse_spec_expr("a[i] == \\old<4>(a[i]) + 7")
        assert not isinstance(expr, list)
        olds = [e for e in _subexprs(expr) if isinstance(e, ast.Old)]
        assert olds[0].at_line == 4


def _subexprs(e):
    yield e
    for name in getattr(e, "__dataclass_fields__", {}):
        v = getattr(e, name)
        if isinstance(v, ast.Expr):
            yield from _subexprs(v)
        elif isinstance(v, tuple):
            for item in v:
                if isinstance(item, ast.Expr):
                    yield from _subexprs(item)


class TestSpans:
    def test_clause_roundtrip(self):
        unit = parse_ok((PAPER / "listing3.mjava").read_text(), "listing3.mjava")
        m = unit.classes[0].method("zero")
        for clause in m.contract.requires + m.contract.ensures + m.contract.assignable:
            assert span_text(unit, clause.span) == clause.raw_text

    def test_requires_text_is_verbatim(self):
        unit = parse_ok((PAPER / "listing3.mjava").read_text(), "l3.mjava")
        m = unit.classes[0].method("zero")
        assert m.contract.requires[0].raw_text == "0 <= to"

    def test_swap_ensures_line(self):
        unit = parse_ok((PAPER / "listing1.mjava").read_text(), "l1.mjava")
        m = unit.classes[0].method("swap")
        assert m.contract.ensures[0].raw_text == \
            "a[i] == \\old(a[j]) && a[j] == \\old(a[i])"

    def test_zero_width_span(self):
        unit = parse_ok("class C {}")
        span = ast.Span("test.mjava", 1, 3, 1, 3)
        assert span_text(unit, span) == ""

    def test_every_statement_has_exact_span(self):
        unit = parse_ok(fixture_text("listing3.mjava"))
        m = unit.classes[0].method("zero")

        def walk(s):
            text = span_text(unit, s.span)
            assert text.strip(), f"empty span for {type(s).__name__}"
            if isinstance(s, ast.While):
                walk(s.body)
            elif isinstance(s, ast.Block):
                for c in s.stmts:
                    walk(c)

        for s in m.body:
            walk(s)


class TestCheckShape:
    def test_two_statements_one_line(self):
        unit = parse_ok("class C {\n  void m() {\n    int a = 0; int b = 1;\n  }\n}")
        diags = check_shape(unit)
        assert len(diags) == 1
        assert "one statement" in diags[0].message

    def test_paper_listings_are_well_shaped(self):
        for name in ("listing1", "listing2", "listing3", "listing4"):
            unit = parse_ok((PAPER / f"{name}.mjava").read_text(), name)
            assert check_shape(unit) == []

    def test_compound_return_rejected(self):
        unit = parse_ok("class C {\n  int m(int x) {\n    return x + 1;\n  }\n}")
        diags = check_shape(unit)
        assert len(diags) == 1
        assert "return" in diags[0].message

    def test_variable_and_literal_returns_ok(self):
        unit = parse_ok(
            "class C {\n  int m(int x) {\n    return x;\n  }\n"
            "  int k() {\n    return 3;\n  }\n}"
        )
        assert check_shape(unit) == []


class TestTypecheck:
    def test_clean_fixture(self):
        unit = parse_ok(fixture_text("listing4.mjava"))
        assert typecheck(unit) == []

    def test_unknown_variable(self):
        unit = parse_ok("class C {\n  void m() {\n    x = 1;\n  }\n}")
        assert any("unknown" in d.message for d in typecheck(unit))

    def test_type_mismatch(self):
        unit = parse_ok("class C {\n  void m(int x) {\n    x = true;\n  }\n}")
        assert typecheck(unit)

    def test_unknown_label_in_old(self):
        unit = parse_ok(
            "class C {\n  void m(int x) {\n    //@ assert x == \\old(x, nolabel);\n"
            "    return;\n  }\n}"
        )
        assert any("nolabel" in d.message for d in typecheck(unit))

    def test_result_only_in_ensures(self):
        unit = parse_ok(
            "class C {\n  /*@ requires \\result > 0; @*/\n"
            "  int m(int x) {\n    return x;\n  }\n}"
        )
        assert any("result" in d.message for d in typecheck(unit))

    def test_duplicate_local(self):
        unit = parse_ok(
            "class C {\n  void m() {\n    int x = 0;\n    int x = 1;\n  }\n}"
        )
        assert any("redeclaration" in d.message for d in typecheck(unit))

    def test_bound_variable_not_assignable(self):
        unit = parse_ok(
            "class C {\n  /*@ requires (\\forall int k; k > 0; k > -1); @*/\n"
            "  void m() {}\n}"
        )
        assert typecheck(unit) == []


class TestDeterminism:
    def test_reparse_stability(self):
        text = fixture_text("listing3.mjava")
        u1 = parse_ok(text)
        u2 = parse_ok(text)
        assert u1 == u2
