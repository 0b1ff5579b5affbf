"""Program payloads carried inside diamond modalities."""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Union

from ..frontend import ast
from .terms import BOOL, Operator, OpKind, Term, mk_term


@dataclass(frozen=True)
class EntryCall:
    """The initial `res = self.m(p1, ..., pn);` item of a proof obligation."""

    class_name: str
    method_name: str

    @property
    def line(self) -> int:
        return 0


ProgramItem = Union[ast.Stmt, EntryCall]


@dataclass(frozen=True)
class ModProgram:
    """Remaining statements of a diamond modality."""

    items: tuple[ProgramItem, ...]
    unit: "ast.SourceUnit" = dataclass_field(default=None, compare=False, repr=False)

    def head(self):
        return self.items[0] if self.items else None

    def tail(self) -> "ModProgram":
        return ModProgram(self.items[1:], self.unit)

    def with_prefix(self, items) -> "ModProgram":
        return ModProgram(tuple(items) + self.items[1:], self.unit)


def diamond(program: ModProgram, post: Term) -> Term:
    op = Operator("diamond", OpKind.MODALITY, program)
    return mk_term(op, (post,))


def is_diamond(t: Term) -> bool:
    return t.op.kind is OpKind.MODALITY


def item_text(item: ProgramItem, raw_text: str) -> str:
    if isinstance(item, EntryCall):
        return f"res = self.{item.method_name}(...);"
    txt = ast.slice_span(raw_text, item.span)
    return " ".join(txt.split())
