"""Ground linear integer arithmetic by Fourier-Motzkin elimination.

Sound and incomplete: `Valid` is returned only when the refutation set is
provably unsatisfiable.  Non-arithmetic subterms (heap selects, skolem
constants, division) are treated as opaque atoms, disequalities are handled
by bounded case splitting, strict bounds are tightened to weak ones over the
integers, and the final elimination runs over exact rationals.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from ..logic import (
    AND, EQ, FALSE, GT, IMP, NOT, OR, TRUE,
    OpKind, Sequent, Term, poly_of, term_key,
)

MAX_VARS = 40
MAX_CONSTRAINTS = 600
MAX_DISEQ_SPLITS = 6


class _Budget:
    def __init__(self):
        self.blown = False


def decide_linear_int(sequent: Sequent) -> str:
    """'Valid' if the sequent is provably valid, else 'Unknown'."""
    refutation = list(sequent.antecedent) + [_neg(f) for f in sequent.succedent]
    budget = _Budget()
    result = _refute(refutation, budget)
    if budget.blown:
        return "Unknown"
    return "Valid" if result else "Unknown"


def _neg(t: Term) -> Term:
    from ..logic import negate_formula

    return negate_formula(t)


def _refute(formulas: list[Term], budget: _Budget) -> bool:
    """True iff the conjunction of the formulas is unsatisfiable."""
    # split non-literal boolean structure first
    stack = list(formulas)
    literals: list[Term] = []
    while stack:
        f = stack.pop()
        if f == TRUE:
            continue
        if f == FALSE:
            return True
        if f.op == AND:
            stack.extend(f.children)
        elif f.op == NOT and f.children[0].op == NOT:
            stack.append(f.children[0].children[0])
        elif f.op == NOT and f.children[0].op == AND:
            a, b = f.children[0].children
            return _refute(literals + stack + [_neg(a)], budget) and _refute(
                literals + stack + [_neg(b)], budget
            )
        elif f.op == OR:
            a, b = f.children
            return _refute(literals + stack + [a], budget) and _refute(
                literals + stack + [b], budget
            )
        elif f.op == IMP:
            a, b = f.children
            return _refute(literals + stack + [_neg(a)], budget) and _refute(
                literals + stack + [b], budget
            )
        elif f.op == NOT and f.children[0].op == OR:
            a, b = f.children[0].children
            stack.extend([_neg(a), _neg(b)])
        elif f.op == NOT and f.children[0].op == IMP:
            a, b = f.children[0].children
            stack.extend([a, _neg(b)])
        else:
            literals.append(f)
    return _refute_literals(literals, budget)


def _refute_literals(literals: list[Term], budget: _Budget) -> bool:
    ineqs: list[tuple[dict, Fraction]] = []  # sum coeffs*atom <= const
    bool_pos: set[str] = set()
    bool_neg: set[str] = set()
    diseqs: list[tuple[Term, Term]] = []

    def add_le(lhs_poly, rhs_const):
        coeffs = {k: Fraction(v) for k, v in lhs_poly.items()}
        ineqs.append((coeffs, Fraction(rhs_const)))

    def poly_diff(a: Term, b: Term):
        ma, ca = poly_of(a)
        mb, cb = poly_of(b)
        out = dict(ma)
        for k, v in mb.items():
            out[k] = out.get(k, 0) - v
            if out[k] == 0:
                del out[k]
        return out, ca - cb

    for lit in literals:
        neg = False
        f = lit
        while f.op == NOT:
            neg = not neg
            f = f.children[0]
        if f.op == GT and not _has_bound(f):
            monos, k = poly_diff(f.children[0], f.children[1])
            if not neg:
                # p + k > 0  =>  -p <= k - 1  (integer tightening)
                add_le({m: -v for m, v in monos.items()}, k - 1)
            else:
                # not(p + k > 0)  =>  p <= -k
                add_le(dict(monos), -k)
        elif f.op == EQ and f.children[0].sort.kind == "int" and not _has_bound(f):
            monos, const = poly_diff(f.children[0], f.children[1])
            if not neg:
                add_le(dict(monos), -const)
                add_le({k: -v for k, v in monos.items()}, const)
            else:
                if not monos:
                    if const == 0:
                        return True  # t != t
                    continue  # distinct constants: trivially satisfied
                diseqs.append((f.children[0], f.children[1]))
        else:
            key = term_key(f)
            (bool_neg if neg else bool_pos).add(key)

    if bool_pos & bool_neg:
        return True

    # bounded case splits over integer disequalities: a != b -> a < b or a > b
    if diseqs:
        if len(diseqs) > MAX_DISEQ_SPLITS:
            diseqs = diseqs[:MAX_DISEQ_SPLITS]

        def split(i: int, acc: list[tuple[dict, Fraction]]) -> bool:
            if i == len(diseqs):
                return _fm_unsat(ineqs + acc, budget)
            a, b = diseqs[i]
            monos, const = poly_diff(a, b)
            lt = (dict({k: Fraction(v) for k, v in monos.items()}), Fraction(-const - 1))
            gt_m = {k: Fraction(-v) for k, v in monos.items()}
            gt = (gt_m, Fraction(const - 1))
            return split(i + 1, acc + [lt]) and split(i + 1, acc + [gt])

        return split(0, [])
    return _fm_unsat(ineqs, budget)


def _has_bound(t: Term) -> bool:
    return any(s.op.kind is OpKind.BOUND_VAR for s in t.subterms())


def _fm_unsat(constraints: list[tuple[dict, Fraction]], budget: _Budget) -> bool:
    """Fourier-Motzkin over the rationals; True iff provably unsatisfiable."""
    coeffs = [dict(c[0]) for c in constraints]
    consts = [c[1] for c in constraints]

    while True:
        # drop satisfied constant rows; detect contradictions
        nxt_coeffs, nxt_consts = [], []
        for co, k in zip(coeffs, consts):
            if not co:
                if k < 0:
                    return True
                continue
            nxt_coeffs.append(co)
            nxt_consts.append(k)
        coeffs, consts = nxt_coeffs, nxt_consts
        if not coeffs:
            return False
        variables = sorted({v for co in coeffs for v in co})
        if len(variables) > MAX_VARS or len(coeffs) > MAX_CONSTRAINTS:
            budget.blown = True
            return False
        # eliminate the variable with the fewest upper*lower combinations
        best, best_cost = None, None
        for v in variables:
            ups = sum(1 for co in coeffs if co.get(v, 0) > 0)
            downs = sum(1 for co in coeffs if co.get(v, 0) < 0)
            cost = ups * downs - (ups + downs)
            if best_cost is None or cost < best_cost:
                best, best_cost = v, cost
        v = best
        ups, downs, rest_c, rest_k = [], [], [], []
        for co, k in zip(coeffs, consts):
            a = co.get(v, 0)
            if a > 0:
                ups.append((co, k))
            elif a < 0:
                downs.append((co, k))
            else:
                rest_c.append(co)
                rest_k.append(k)
        new_c, new_k = list(rest_c), list(rest_k)
        for co1, k1 in ups:
            a1 = co1[v]
            for co2, k2 in downs:
                a2 = -co2[v]
                combined = {}
                for key, val in co1.items():
                    combined[key] = combined.get(key, Fraction(0)) + val * a2
                for key, val in co2.items():
                    combined[key] = combined.get(key, Fraction(0)) + val * a1
                combined = {k_: v_ for k_, v_ in combined.items() if v_ != 0}
                assert v not in combined
                new_c.append(combined)
                new_k.append(k1 * a2 + k2 * a1)
        if len(new_c) > MAX_CONSTRAINTS:
            budget.blown = True
            return False
        coeffs, consts = new_c, new_k
