"""Frontend: parsing and checking of `.mjava` compilation units."""

from . import ast
from .ast import Diagnostic, SourceUnit, Span, slice_span
from .parser import parse_spec_expr, parse_unit
from .typecheck import check_shape, typecheck


def span_text(unit: SourceUnit, span: Span) -> str:
    """The exact substring of the unit's file covered by `span`."""
    return slice_span(unit.raw_text, span)


def load_unit(text: str, path: str) -> SourceUnit:
    """Parse + shape-check + type-check; raises FrontendError on diagnostics."""
    result = parse_unit(text, path)
    if isinstance(result, list):
        raise FrontendError(result)
    diags = check_shape(result) + typecheck(result)
    if diags:
        raise FrontendError(diags)
    return result


class FrontendError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics
