"""Scripts that rebuild a compiled group in GAP or Magma syntax.

Both dialects list the generators in composition-series order, give every
power relation and every nontrivial commutator relation, and ask the
system for a pc group.  Output depends only on the input, so repeated
emission is byte-identical.
"""

from __future__ import annotations

from typing import Mapping

from ..errors import InvalidArgument
from ..numtheory import PrimeContext
from ..pcgroup import PcPresentation
from . import ast as A
from .compiler import compile_spec
from .evaluate import ParamBinding

DIALECTS = ("gap-style", "magma-style")


def _word(pres: PcPresentation, v, dialect: str) -> str:
    parts = []
    for i, e in enumerate(v):
        if e:
            g = pres.names[i]
            parts.append(g if e == 1 else f"{g}^{e}")
    if not parts:
        return "One(F)" if dialect == "gap-style" else "1"
    return "*".join(parts)


def _header(pres: PcPresentation, label: str, binding: ParamBinding | None,
            comment: str) -> list[str]:
    lines = [f"{comment} group of order {pres.p}^{pres.n}"]
    if label:
        lines.append(f"{comment} family {label}")
    lines.append(f"{comment} p = {pres.p}")
    if binding is not None and binding.assignments:
        lines.append(f"{comment} parameters {binding.describe()}")
    lines.append(f"{comment} generators in series order: {', '.join(pres.names)}")
    return lines


def _gap(pres: PcPresentation, head: list[str]) -> str:
    names = pres.names
    lines = head + [
        "F := FreeGroup(" + ", ".join(f'"{g}"' for g in names) + ");",
    ]
    lines += [f"{g} := F.{i};" for i, g in enumerate(names, 1)]
    rels = []
    for i, g in enumerate(names):
        rhs = pres.power_rhs[i]
        rels.append(f"{g}^{pres.p}" if not any(rhs) else f"{g}^{pres.p}/({_word(pres, rhs, 'gap-style')})")
    for (j, i), v in pres.comm_rhs.items():
        rels.append(f"Comm({names[j - 1]},{names[i - 1]})/({_word(pres, v, 'gap-style')})")
    lines.append("rels := [")
    lines += [f"  {r}," for r in rels[:-1]] + [f"  {rels[-1]}"]
    lines.append("];")
    lines.append("G := PcGroupFpGroup(F / rels);")
    return "\n".join(lines) + "\n"


def _magma(pres: PcPresentation, head: list[str]) -> str:
    names = pres.names
    gens = ",".join(names)
    lines = head + [f"F<{gens}> := FreeGroup({pres.n});"]
    rels = []
    for i, g in enumerate(names):
        rels.append(f"{g}^{pres.p} = {_word(pres, pres.power_rhs[i], 'magma-style')}")
    for (j, i), v in pres.comm_rhs.items():
        rels.append(f"({names[j - 1]},{names[i - 1]}) = {_word(pres, v, 'magma-style')}")
    lines.append(f"G<{gens}> := quo< GrpPC : F |")
    lines += [f"  {r}," for r in rels[:-1]] + [f"  {rels[-1]}"]
    lines.append(">;")
    return "\n".join(lines) + "\n"


def emit_cas(source: PcPresentation | A.FamilySpec, dialect: str = "gap-style",
             binding: ParamBinding | Mapping[str, int] | None = None,
             ctx: PrimeContext | None = None, label: str | None = None) -> str:
    """Script constructing the group in ``dialect`` ("gap-style" or "magma-style").

    ``source`` is a compiled presentation, or a spec to be compiled at
    ``binding`` and ``ctx``.  The header comment records the label, p and
    parameter values.
    """
    if dialect not in DIALECTS:
        raise InvalidArgument(f"unsupported dialect {dialect!r}; choose from {', '.join(DIALECTS)}")
    if binding is not None and not isinstance(binding, ParamBinding):
        binding = ParamBinding(dict(binding))
    if isinstance(source, A.FamilySpec):
        if ctx is None:
            raise InvalidArgument("compiling a spec needs a PrimeContext")
        pres = compile_spec(source, binding, ctx)
        label = source.label if label is None else label
    else:
        pres = source
    comment = "#" if dialect == "gap-style" else "//"
    head = _header(pres, label or "", binding, comment)
    return _gap(pres, head) if dialect == "gap-style" else _magma(pres, head)
