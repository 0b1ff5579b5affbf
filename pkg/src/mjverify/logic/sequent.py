"""Sequents: ordered antecedent and succedent without structural duplicates."""

from __future__ import annotations

from typing import Iterable, Optional

from .terms import Term


def _dedup(terms: Iterable[Term]) -> tuple[Term, ...]:
    seen = []
    for t in terms:
        if t not in seen:
            seen.append(t)
    return tuple(seen)


class Sequent:
    __slots__ = ("antecedent", "succedent", "_hash")

    def __init__(self, antecedent: Iterable[Term] = (), succedent: Iterable[Term] = ()):
        ante = _dedup(antecedent)
        succ = _dedup(succedent)
        for t in ante + succ:
            if t.sort.kind != "bool":
                raise ValueError(f"sequent formula of sort {t.sort}: {t!r}")
        object.__setattr__(self, "antecedent", ante)
        object.__setattr__(self, "succedent", succ)
        object.__setattr__(self, "_hash", hash((ante, succ)))

    def __setattr__(self, *_):
        raise AttributeError("sequents are immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Sequent)
            and self.antecedent == other.antecedent
            and self.succedent == other.succedent
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        from .printing import sequent_to_str

        return sequent_to_str(self)

    def side(self, which: str) -> tuple[Term, ...]:
        return self.antecedent if which == "ante" else self.succedent

    def formula(self, which: str, index: int) -> Term:
        return self.side(which)[index]

    def with_added(self, which: str, *terms: Term) -> "Sequent":
        if which == "ante":
            return Sequent(self.antecedent + terms, self.succedent)
        return Sequent(self.antecedent, self.succedent + terms)

    def with_removed(self, which: str, index: int) -> "Sequent":
        side = list(self.side(which))
        del side[index]
        if which == "ante":
            return Sequent(side, self.succedent)
        return Sequent(self.antecedent, side)

    def with_replaced(self, which: str, index: int, *terms: Term) -> "Sequent":
        side = list(self.side(which))
        side[index : index + 1] = list(terms)
        if which == "ante":
            return Sequent(side, self.succedent)
        return Sequent(self.antecedent, side)

    def index_of(self, which: str, term: Term) -> Optional[int]:
        for i, t in enumerate(self.side(which)):
            if t == term:
                return i
        return None
