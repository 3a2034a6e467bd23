"""Canonical text form of family specs.

Printing uses the fewest parentheses the grammar allows, one statement per
line, and a blank line between blocks, so ``parse(serialize(specs))``
reproduces the same trees and repeated calls give identical bytes.
"""

from __future__ import annotations

from typing import Iterable

from . import ast as A

# binding strength; higher binds tighter
_PREC = {
    "when": 1, "or": 2, "and": 3, "not": 4,
    "==": 5, "!=": 5, "<": 5, "<=": 5, ">": 5, ">=": 5,
    "++": 6, "..": 7, "+": 8, "-": 8, "*": 9, "/": 9, "mod": 9,
    "neg": 10, "^": 11, "atom": 12,
}


def _prec(e: A.Expr) -> int:
    if isinstance(e, A.Num):
        return _PREC["neg"] if e.value < 0 else _PREC["atom"]
    if isinstance(e, A.Unary):
        return _PREC["neg"] if e.op == "-" else _PREC["not"]
    if isinstance(e, A.Binary):
        return _PREC[e.op]
    if isinstance(e, A.Range):
        return _PREC[".."]
    if isinstance(e, A.Choice):
        return _PREC["when"]
    return _PREC["atom"]


def _wrap(e: A.Expr, minimum: int) -> str:
    s = expr_text(e)
    return f"({s})" if _prec(e) < minimum else s


def expr_text(e: A.Expr) -> str:
    if isinstance(e, A.Num):
        return str(e.value)
    if isinstance(e, A.Name):
        return e.id
    if isinstance(e, A.Unary):
        if e.op == "-":
            return "-" + _wrap(e.operand, _PREC["neg"])
        return "not " + _wrap(e.operand, _PREC["not"])
    if isinstance(e, A.Binary):
        op = e.op
        k = _PREC[op]
        if op == "^":
            return f"{_wrap(e.left, _PREC['atom'])}^{_wrap(e.right, _PREC['neg'])}"
        if k == _PREC["=="]:
            return f"{_wrap(e.left, k + 1)} {op} {_wrap(e.right, k + 1)}"
        return f"{_wrap(e.left, k)} {op} {_wrap(e.right, k + 1)}"
    if isinstance(e, A.Call):
        return f"{e.func}({', '.join(expr_text(a) for a in e.args)})"
    if isinstance(e, A.TupleExpr):
        return f"({', '.join(expr_text(a) for a in e.items)})"
    if isinstance(e, A.ListExpr):
        return "{" + ", ".join(expr_text(a) for a in e.items) + "}"
    if isinstance(e, A.Range):
        k = _PREC["+"]
        return f"{_wrap(e.lo, k)}..{_wrap(e.hi, k)}"
    if isinstance(e, A.Choice):
        k = _PREC["or"]
        return f"{_wrap(e.then, k)} when {_wrap(e.cond, k)} else {_wrap(e.other, _PREC['when'])}"
    if isinstance(e, A.Comprehension):
        body = f"{expr_text(e.elem)} : {', '.join(_clause_text(c) for c in e.clauses)}"
        return ("first{" if e.first else "{") + body + "}"
    raise TypeError(f"not an expression: {e!r}")


def _target_text(t: tuple[str, ...]) -> str:
    return t[0] if len(t) == 1 else f"({', '.join(t)})"


def _clause_text(c: A.Clause) -> str:
    if isinstance(c, A.ForClause):
        return f"{_target_text(c.target)} in {expr_text(c.source)}"
    if isinstance(c, A.LetClause):
        return f"let {_target_text(c.target)} = {expr_text(c.value)}"
    return expr_text(c.cond)


_NEGATED = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


def condition_text(cond: A.Expr, holds: bool = True) -> str:
    """Source text of a condition, or of its negation when ``holds`` is False."""
    if holds:
        return expr_text(cond)
    if isinstance(cond, A.Binary) and cond.op in _NEGATED:
        return expr_text(A.Binary(_NEGATED[cond.op], cond.left, cond.right))
    if isinstance(cond, A.Unary) and cond.op == "not":
        return expr_text(cond.operand)
    return "not " + _wrap(cond, _PREC["not"])


def _exponent_text(e: A.Expr) -> str:
    if isinstance(e, (A.Num, A.Name)):
        return expr_text(e)
    if isinstance(e, A.Unary) and e.op == "-" and isinstance(e.operand, (A.Name, A.Num)):
        return "-" + expr_text(e.operand)
    return f"({expr_text(e)})"


def word_text(word: A.Word) -> str:
    if not word:
        return "1"
    parts = []
    for g, e in word:
        parts.append(g if e == A.Num(1) else f"{g}^{_exponent_text(e)}")
    return " * ".join(parts)


def _gens_text(gens: tuple[str, ...]) -> str:
    runs: list[list[str]] = []
    for g in gens:
        if runs:
            last = runs[-1][-1]
            if last[0] == g[0] and int(g[1:]) == int(last[1:]) + 1:
                runs[-1].append(g)
                continue
        runs.append([g])
    return ", ".join(r[0] if len(r) == 1 else f"{r[0]}..{r[-1]}" for r in runs)


def convention_text(c: A.Convention) -> str:
    return f"convention bracket={c.bracket} order={c.order}"


def spec_text(spec: A.FamilySpec) -> str:
    head = f"family {spec.family}"
    if spec.label:
        head += f' label "{spec.label}"'
    head += f" rank {spec.rank}"
    lines = [head, f"gens {_gens_text(spec.generators)}"]
    for d in spec.params:
        lines.append(f"param {_target_text(d.names)} in {expr_text(d.values)}")
    if spec.condition is not None:
        lines.append(f"when {expr_text(spec.condition)}")
    for r in spec.powers:
        lines.append(f"pow {r.gen}^p = {word_text(r.word)}")
    for r in spec.comms:
        lines.append(f"comm [{r.left},{r.right}] = {word_text(r.word)}")
    for r in spec.defs:
        lines.append(f"def {r.gen} = {word_text(r.word)}")
    return "\n".join(lines) + "\n"


def serialize(specs: A.FamilySpec | Iterable[A.FamilySpec]) -> str:
    """Canonical source for one spec or a sequence of specs (LF, one trailing newline)."""
    if isinstance(specs, A.FamilySpec):
        specs = [specs]
    chunks = []
    conv = None
    for spec in specs:
        if spec.convention != conv:
            conv = spec.convention
            chunks.append(convention_text(conv) + "\n")
        chunks.append(spec_text(spec))
    return "\n".join(chunks)
