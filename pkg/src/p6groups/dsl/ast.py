"""Syntax tree of the presentation language.

Nodes are frozen dataclasses.  Source locations are carried for
diagnostics but excluded from equality, so a tree parsed from canonical
text compares equal to the tree it was printed from.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Loc:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


def _loc():
    return field(default=None, compare=False, repr=False)


# -- expressions -------------------------------------------------------------

class Expr:
    """Base class of expression nodes."""


@dataclass(frozen=True)
class Num(Expr):
    value: int
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class Name(Expr):
    id: str
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # "-" or "not"
    operand: Expr
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # + - * / mod ^ ++ == != < <= > >= and or in
    left: Expr
    right: Expr
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class Call(Expr):
    func: str
    args: tuple[Expr, ...]
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class TupleExpr(Expr):
    items: tuple[Expr, ...]
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class ListExpr(Expr):
    items: tuple[Expr, ...]
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class Range(Expr):
    """Inclusive integer interval ``lo..hi``."""
    lo: Expr
    hi: Expr
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class Choice(Expr):
    """``then when cond else other``."""
    then: Expr
    cond: Expr
    other: Expr
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class ForClause:
    target: tuple[str, ...]  # one name, or several for tuple unpacking
    source: Expr


@dataclass(frozen=True)
class LetClause:
    target: tuple[str, ...]
    value: Expr


@dataclass(frozen=True)
class FilterClause:
    cond: Expr


Clause = ForClause | LetClause | FilterClause


@dataclass(frozen=True)
class Comprehension(Expr):
    """``{elem : clauses}``; with ``first`` it yields the first element only."""
    elem: Expr
    clauses: tuple[Clause, ...]
    first: bool = False
    loc: Loc | None = _loc()


# -- family blocks -----------------------------------------------------------

Word = tuple[tuple[str, Expr], ...]


@dataclass(frozen=True)
class ParamDecl:
    names: tuple[str, ...]
    values: Expr
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class PowerRel:
    gen: str
    word: Word
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class CommRel:
    left: str
    right: str
    word: Word
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class DefRel:
    gen: str
    word: Word
    loc: Loc | None = _loc()


@dataclass(frozen=True)
class Convention:
    bracket: str = "left-normed"
    order: str = "ij"


@dataclass(frozen=True)
class FamilySpec:
    family: int
    label: str
    rank: int
    generators: tuple[str, ...]
    params: tuple[ParamDecl, ...] = ()
    condition: Expr | None = None
    powers: tuple[PowerRel, ...] = ()
    comms: tuple[CommRel, ...] = ()
    defs: tuple[DefRel, ...] = ()
    convention: Convention = Convention()
    loc: Loc | None = _loc()

    @property
    def alphas(self) -> tuple[str, ...]:
        return tuple(g for g in self.generators if g.startswith("a"))

    @property
    def betas(self) -> tuple[str, ...]:
        return tuple(g for g in self.generators if g.startswith("b"))

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(n for d in self.params for n in d.names)
