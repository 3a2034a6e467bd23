"""From a family spec and a parameter binding to a pc presentation.

Steps: evaluate every relation word under the binding (exponents are
exact integers, so g^-1 is the inverse of g even when g^p is not trivial), orient commutators by the file convention, replace each defined
a-generator by its b-word, then order the surviving generators along a
composition series (b-generators first, in declaration order, whenever
the relations allow) and collect the right-hand sides.
"""

from __future__ import annotations

from ..errors import MalformedSpec
from ..numtheory import PrimeContext
from ..pcgroup import PcPresentation
from . import ast as A
from .assemble import assemble
from .evaluate import ParamBinding, base_env, check_binding, eval_word

CATALOG_GENERATORS = 6


def _substitute(word, defs):
    out = []
    for g, e in word:
        if g not in defs:
            out.append((g, e))
            continue
        # w^e as |e| copies of w or of its inverse; b-words need not commute
        w = defs[g] if e > 0 else [(x, -k) for x, k in reversed(defs[g])]
        out.extend(w * abs(e))
    return out


def compile_spec(spec: A.FamilySpec, binding: ParamBinding | None, ctx: PrimeContext,
                 generators: int | None = CATALOG_GENERATORS,
                 check: bool = True) -> PcPresentation:
    """Compile ``spec`` at ``binding``.

    ``generators`` is the required number of surviving generators (None
    skips the check).  With ``check`` the binding must be admissible.
    """
    p = ctx.p
    binding = binding or ParamBinding()
    if check:
        check_binding(spec, binding, ctx)
    env = {**base_env(ctx), **binding.assignments}

    defs: dict[str, list[tuple[str, int]]] = {}
    for d in spec.defs:
        word = eval_word(d.word, ctx, env)
        if not word:
            raise MalformedSpec(f"{d.gen} is defined as the identity")
        defs[d.gen] = word

    def head(g: str, what: str) -> tuple[str, int]:
        """Generator standing for g on a left-hand side, with the power it is raised to."""
        if g not in defs:
            return g, 1
        w = defs[g]
        if len(w) != 1:
            raise MalformedSpec(f"{g} occurs in a {what} but is defined by a word of length {len(w)}")
        return w[0]

    powers: dict[str, list[tuple[str, int]]] = {}
    for r in spec.powers:
        g, k = head(r.gen, "power relation")
        if g in powers:
            raise MalformedSpec(f"two power relations for {g} after substituting definitions")
        rhs = _substitute(eval_word(r.word, ctx, env), defs)
        if k != 1 and rhs:
            # (g^k)^p = 1 forces g^p = 1 (k is prime to p); other roots are not unique words
            raise MalformedSpec(f"{r.gen} is defined as a proper power and has a nontrivial p-th power")
        powers[g] = rhs

    comms: dict[tuple[str, str], list[tuple[str, int]]] = {}
    seen: set[frozenset] = set()
    for r in spec.comms:
        x, y = (r.right, r.left) if spec.convention.order == "ji" else (r.left, r.right)
        (x, kx), (y, ky) = head(x, "commutator relation"), head(y, "commutator relation")
        if kx != 1 or ky != 1:
            raise MalformedSpec(f"commutator relation [{r.left},{r.right}] involves a generator "
                                "defined as a proper power")
        if x == y:
            raise MalformedSpec(f"commutator [{r.left},{r.right}] has equal entries after substitution")
        key = frozenset((x, y))
        if key in seen:
            raise MalformedSpec(f"two commutator relations for {x}, {y} after substituting definitions")
        seen.add(key)
        comms[(x, y)] = _substitute(eval_word(r.word, ctx, env), defs)

    names = [g for g in spec.generators if g not in defs]
    if generators is not None and len(names) != generators:
        raise MalformedSpec(f"{len(names)} generators survive elimination, expected {generators}")
    betas = [g for g in names if g.startswith("b")]
    priority = {g: i for i, g in enumerate(betas + [g for g in names if not g.startswith("b")])}
    return assemble(p, names, powers, comms, priority)

