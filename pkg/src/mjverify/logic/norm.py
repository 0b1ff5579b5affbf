"""Polynomial normal form for integer terms and comparisons.

Every comparison is normalized to `poly > c` with sorted monomials and the
constant moved to the right-hand side; `0 <= to` becomes the internal term
`to > -1`.  The same normalizer runs after updates substitute into formulas,
so structurally equal inputs always normalize to structurally equal terms.
"""

from __future__ import annotations

from typing import Optional

from .terms import (
    ADD, AND, EQ, FALSE, GT, IMP, ITE, MUL, NOT, OR, TRUE,
    OpKind, OriginRef, Term, int_lit, mk_term, term_key,
)

# a polynomial is {monomial-atoms -> coefficient} plus an integer constant;
# a monomial key is a sorted tuple of (key, atom) pairs
Mono = tuple[tuple[str, Term], ...]
Poly = tuple[dict[Mono, int], int]


def _is_int_const(t: Term) -> Optional[int]:
    if t.op.kind is OpKind.CONSTANT and isinstance(t.op.payload, int):
        return t.op.payload
    return None


def poly_of(t: Term) -> Poly:
    """Decompose an int term into monomials; non-arithmetic subterms are atoms."""
    c = _is_int_const(t)
    if c is not None:
        return {}, c
    if t.op == ADD:
        m1, c1 = poly_of(t.children[0])
        m2, c2 = poly_of(t.children[1])
        out = dict(m1)
        for k, v in m2.items():
            out[k] = out.get(k, 0) + v
            if out[k] == 0:
                del out[k]
        return out, c1 + c2
    if t.op == MUL:
        m1, c1 = poly_of(t.children[0])
        m2, c2 = poly_of(t.children[1])
        out: dict[Mono, int] = {}
        const = c1 * c2

        def add_mono(key: Mono, coeff: int):
            if coeff == 0:
                return
            out[key] = out.get(key, 0) + coeff
            if out[key] == 0:
                del out[key]

        for k1, v1 in m1.items():
            add_mono(k1, v1 * c2)
        for k2, v2 in m2.items():
            add_mono(k2, v2 * c1)
        for k1, v1 in m1.items():
            for k2, v2 in m2.items():
                merged = tuple(sorted(k1 + k2, key=lambda p: p[0]))
                add_mono(merged, v1 * v2)
        return out, const
    # atom
    return {((term_key(t), t),): 1}, 0


def poly_term(monos: dict[Mono, int], const: int) -> Term:
    """Rebuild the canonical term: sorted monomials, constant last."""
    parts: list[Term] = []
    for key in sorted(monos.keys()):
        coeff = monos[key]
        atoms = [a for (_, a) in key]
        prod = atoms[-1]
        for a in reversed(atoms[:-1]):
            prod = mk_term(MUL, (a, prod))
        if coeff == 1:
            parts.append(prod)
        else:
            parts.append(mk_term(MUL, (int_lit(coeff), prod)))
    if const != 0 or not parts:
        parts.append(int_lit(const))
    out = parts[0]
    for p in parts[1:]:
        out = mk_term(ADD, (out, p))
    return out


def norm_int(t: Term) -> Term:
    """Canonical polynomial form of an int-sorted term."""
    monos, const = poly_of(t)
    return poly_term(monos, const)


def poly_sub(a: Poly, b: Poly) -> Poly:
    out = dict(a[0])
    for k, v in b[0].items():
        out[k] = out.get(k, 0) - v
        if out[k] == 0:
            del out[k]
    return out, a[1] - b[1]


def mk_gt(lhs: Term, rhs: Term, origins: frozenset[OriginRef] = frozenset()) -> Term:
    """Normalized `lhs > rhs`: constant-free polynomial on the left."""
    monos, const = poly_sub(poly_of(lhs), poly_of(rhs))
    if not monos:
        return TRUE.with_origins(origins) if const > 0 else FALSE.with_origins(origins)
    return mk_term(GT, (poly_term(monos, 0), int_lit(-const)), origins)


def mk_compare(op: str, lhs: Term, rhs: Term,
               origins: frozenset[OriginRef] = frozenset()) -> Term:
    if op == "<":
        return mk_gt(rhs, lhs, origins)
    if op == "<=":
        return mk_gt(mk_term(ADD, (rhs, int_lit(1))), lhs, origins)
    if op == ">":
        return mk_gt(lhs, rhs, origins)
    if op == ">=":
        return mk_gt(mk_term(ADD, (lhs, int_lit(1))), rhs, origins)
    raise ValueError(op)


def negate_formula(t: Term) -> Term:
    """Logical negation, normalized on comparisons; origins are preserved."""
    if t == TRUE:
        return FALSE.with_origins(t.origins)
    if t == FALSE:
        return TRUE.with_origins(t.origins)
    if t.op == NOT:
        return t.children[0]
    if t.op == GT:
        c = _is_int_const(t.children[1])
        if c is not None:
            # not(p > c)  <=>  -p > -c-1
            monos, k = poly_of(t.children[0])
            neg = {m: -v for m, v in monos.items()}
            return mk_term(GT, (poly_term(neg, 0), int_lit(-c - 1 + k)), t.origins)
    return mk_term(NOT, (t,))


def simplify(t: Term) -> Term:
    """Bottom-up renormalization after substitution.

    Rebuilt comparisons keep the origins of their roots; untouched subtrees
    are shared.  Heap functions are left alone (rewriting them is the job of
    calculus rules, not normalization).
    """
    if not t.children:
        return t
    kids = tuple(simplify(c) for c in t.children)
    changed = kids != t.children

    if t.op == GT:
        return mk_gt(kids[0], kids[1], t.origins)
    if t.op == EQ:
        if kids[0] == kids[1]:
            return TRUE.with_origins(t.origins)
        if kids[0].sort.kind == "int":
            l, r = norm_int(kids[0]), norm_int(kids[1])
            if l == r:
                return TRUE.with_origins(t.origins)
            lc, rc = _is_int_const(l), _is_int_const(r)
            if lc is not None and rc is not None and lc != rc:
                return FALSE.with_origins(t.origins)
            return mk_term(EQ, (l, r), t.origins)
        return mk_term(EQ, kids, t.origins) if changed else t
    if t.op == AND:
        a, b = kids
        if a == FALSE or b == FALSE:
            return FALSE.with_origins(t.origins)
        if a == TRUE:
            return b
        if b == TRUE:
            return a
        return mk_term(AND, kids, t.origins) if changed else t
    if t.op == OR:
        a, b = kids
        if a == TRUE or b == TRUE:
            return TRUE.with_origins(t.origins)
        if a == FALSE:
            return b
        if b == FALSE:
            return a
        return mk_term(OR, kids, t.origins) if changed else t
    if t.op == IMP:
        a, b = kids
        if a == TRUE:
            return b
        if b == TRUE or a == FALSE:
            return TRUE.with_origins(t.origins)
        if b == FALSE:
            return negate_formula(a)
        return mk_term(IMP, kids, t.origins) if changed else t
    if t.op == NOT:
        inner = kids[0]
        if inner == TRUE or inner == FALSE or inner.op == NOT or inner.op == GT:
            return negate_formula(inner)
        return mk_term(NOT, kids, t.origins) if changed else t
    if t.op == ITE:
        if kids[0] == TRUE:
            return kids[1]
        if kids[0] == FALSE:
            return kids[2]
        if kids[1] == kids[2]:
            return kids[1]
        return mk_term(ITE, kids, t.origins) if changed else t
    if t.sort.kind == "int" and t.op in (ADD, MUL):
        return norm_int(Term(t.op, kids, t.sort, t.origins))
    if changed:
        return Term(t.op, kids, t.sort, t.origins)
    return t
