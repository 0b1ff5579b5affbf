"""Logical core: sorted terms, origins, updates, modalities, sequents."""

from .norm import mk_compare, mk_gt, negate_formula, norm_int, poly_of, poly_term, simplify
from .printing import sequent_to_str, term_to_str
from .program import EntryCall, ModProgram, diamond, is_diamond
from .sequent import Sequent
from .terms import (
    ADD, AND, ANON, ARR, ARRAY_RANGE, ARR_IDX, BOOL, CREATED_FIELD, EMPTY_LOCS,
    EQ, FALSE, FIELD, GT, HEAP, IMP, IN_SET, INT, INT_ARRAY, INTDIV, IMOD,
    IS_ARR_IDX, ITE, LENGTH, LOCSET, MUL, NOT, NULL, NULL_TERM, OBJECT, OR,
    SELECT, SINGLETON, STORE, TRUE, UNION, WELL_FORMED, ALL_LOCS,
    Operator, OpKind, OriginKind, OriginRef, Sort, SortError, Term,
    bound_var, class_inv_op, class_sort, conjuncts, exact_instance_op,
    field_const, int_lit, mk_and, mk_term, origin_of, program_var, pv_term, top_conjuncts,
    quantifier_op, skolem, term_key,
)
from .updates import EMPTY_UPDATE, Update, apply_update, subst_program_vars, update_app
