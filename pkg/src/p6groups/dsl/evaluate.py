"""Evaluation of parameter expressions and expansion of parameter ranges.

Values are Python ints, bools, tuples and lists (ordered, duplicates
kept).  Arithmetic is over the integers except ``^``, which is
exponentiation modulo p (a negative exponent inverts first, so ``nu^-1`` is
the inverse of nu).  ``/`` is exact division and ``mod`` is the
non-negative remainder.  Bound parameter values are reduced mod p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping

from ..errors import MalformedSpec
from ..numtheory import PrimeContext, mod_pow
from . import ast as A


@dataclass(frozen=True)
class ParamBinding:
    """Parameter values for one catalog member.

    ``provenance`` lists the branch conditions (as source text) that
    selected the values, e.g. ``("p mod 4 == 1",)``.
    """

    assignments: Mapping[str, int] = field(default_factory=dict)
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "assignments", dict(self.assignments))

    def describe(self) -> str:
        return " ".join(f"{k}={v}" for k, v in self.assignments.items())


def _fail(msg: str, e: A.Expr | None):
    loc = getattr(e, "loc", None)
    raise MalformedSpec(f"{msg} (at {loc})" if loc else msg)


def _int(v, e) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"expected an integer, got {_kind(v)}", e)
    return v


def _bool(v, e) -> bool:
    if not isinstance(v, bool):
        _fail(f"expected a condition, got {_kind(v)}", e)
    return v


def _list(v, e) -> list:
    if not isinstance(v, list):
        _fail(f"expected a set, got {_kind(v)}", e)
    return v


def _kind(v) -> str:
    return {bool: "a condition", int: "an integer", tuple: "a tuple", list: "a set"}.get(type(v), type(v).__name__)


def base_env(ctx: PrimeContext) -> dict[str, Any]:
    return {"p": ctx.p, "nu": ctx.nu, "omega": ctx.omega}


def evaluate(e: A.Expr, ctx: PrimeContext, env: Mapping[str, Any]):
    p = ctx.p
    if isinstance(e, A.Num):
        return e.value
    if isinstance(e, A.Name):
        if e.id not in env:
            _fail(f"unbound name {e.id!r}", e)
        return env[e.id]
    if isinstance(e, A.Unary):
        v = evaluate(e.operand, ctx, env)
        return -_int(v, e) if e.op == "-" else not _bool(v, e)
    if isinstance(e, A.Binary):
        op = e.op
        if op in ("and", "or"):
            left = _bool(evaluate(e.left, ctx, env), e.left)
            if op == "and" and not left or op == "or" and left:
                return left
            return _bool(evaluate(e.right, ctx, env), e.right)
        a = evaluate(e.left, ctx, env)
        b = evaluate(e.right, ctx, env)
        if op == "++":
            return _list(a, e.left) + _list(b, e.right)
        if op == "==":
            return a == b
        if op == "!=":
            return a != b
        a, b = _int(a, e.left), _int(b, e.right)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0 or a % b:
                _fail(f"{a}/{b} is not an exact division", e)
            return a // b
        if op == "mod":
            if b <= 0:
                _fail("modulus must be positive", e)
            return a % b
        if op == "^":
            if a % p == 0 and b < 0:
                _fail("cannot invert 0 modulo p", e)
            return mod_pow(a % p, b, p)
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
    if isinstance(e, A.Call):
        args = [evaluate(x, ctx, env) for x in e.args]
        if e.func == "square":
            return ctx.is_square(_int(args[0], e.args[0]))
        _fail(f"unknown function {e.func!r}", e)
    if isinstance(e, A.TupleExpr):
        return tuple(evaluate(x, ctx, env) for x in e.items)
    if isinstance(e, A.ListExpr):
        return [evaluate(x, ctx, env) for x in e.items]
    if isinstance(e, A.Range):
        lo = _int(evaluate(e.lo, ctx, env), e.lo)
        hi = _int(evaluate(e.hi, ctx, env), e.hi)
        return list(range(lo, hi + 1))
    if isinstance(e, A.Choice):
        branch = e.then if _bool(evaluate(e.cond, ctx, env), e.cond) else e.other
        return evaluate(branch, ctx, env)
    if isinstance(e, A.Comprehension):
        it = _comprehend(e, ctx, dict(env))
        if e.first:
            for v in it:
                return v
            _fail("'first' found no element", e)
        return list(it)
    _fail(f"cannot evaluate {type(e).__name__}", e)


def _bind(env: dict, target: tuple[str, ...], v, e):
    if len(target) == 1:
        env[target[0]] = v
        return
    if not isinstance(v, tuple) or len(v) != len(target):
        _fail(f"cannot unpack {_kind(v)} into {len(target)} names", e)
    env.update(zip(target, v))


def _comprehend(e: A.Comprehension, ctx, env) -> Iterator:
    def walk(k: int, env: dict):
        if k == len(e.clauses):
            yield evaluate(e.elem, ctx, env)
            return
        c = e.clauses[k]
        if isinstance(c, A.ForClause):
            for v in _list(evaluate(c.source, ctx, env), c.source):
                inner = dict(env)
                _bind(inner, c.target, v, c.source)
                yield from walk(k + 1, inner)
        elif isinstance(c, A.LetClause):
            inner = dict(env)
            _bind(inner, c.target, evaluate(c.value, ctx, env), c.value)
            yield from walk(k + 1, inner)
        elif _bool(evaluate(c.cond, ctx, env), c.cond):
            yield from walk(k + 1, env)
    return walk(0, env)


def _tagged(e: A.Expr, ctx, env) -> list[tuple[Any, tuple[str, ...]]]:
    """Values of a range expression, each with the branch conditions that produced it."""
    from .serialize import condition_text
    if isinstance(e, A.Choice):
        hit = _bool(evaluate(e.cond, ctx, env), e.cond)
        tag = condition_text(e.cond, hit)
        return [(v, (tag,) + t) for v, t in _tagged(e.then if hit else e.other, ctx, env)]
    if isinstance(e, A.Binary) and e.op == "++":
        return _tagged(e.left, ctx, env) + _tagged(e.right, ctx, env)
    return [(v, ()) for v in _list(evaluate(e, ctx, env), e)]


def expand(spec: A.FamilySpec, ctx: PrimeContext) -> list[ParamBinding]:
    """Admissible bindings at ctx.p, first declared parameter outermost."""
    env = base_env(ctx)
    tags0: tuple[str, ...] = ()
    if spec.condition is not None:
        from .serialize import condition_text
        if not _bool(evaluate(spec.condition, ctx, env), spec.condition):
            return []
        tags0 = (condition_text(spec.condition, True),)
    out: list[ParamBinding] = []

    def walk(k: int, env: dict, assigned: dict, tags: tuple[str, ...]):
        if k == len(spec.params):
            out.append(ParamBinding(dict(assigned), tuple(dict.fromkeys(tags))))
            return
        decl = spec.params[k]
        for v, t in _tagged(decl.values, ctx, env):
            vals = (v,) if len(decl.names) == 1 else v
            if not isinstance(vals, tuple) or len(vals) != len(decl.names):
                _fail(f"parameter values must be {len(decl.names)}-tuples", decl.values)
            inner, bound = dict(env), dict(assigned)
            for name, x in zip(decl.names, vals):
                x = _int(x, decl.values) % ctx.p
                inner[name] = bound[name] = x
            walk(k + 1, inner, bound, tags + t)

    walk(0, env, {}, tags0)
    return out


def check_binding(spec: A.FamilySpec, binding: ParamBinding, ctx: PrimeContext) -> None:
    """Raise MalformedSpec unless ``binding`` is one of the block's bindings at ctx.p."""
    names = set(spec.param_names)
    if set(binding.assignments) != names:
        missing = sorted(names - set(binding.assignments))
        extra = sorted(set(binding.assignments) - names)
        raise MalformedSpec(f"binding mismatch: missing {missing}, unexpected {extra}")
    admissible = {tuple(sorted(b.assignments.items())) for b in expand(spec, ctx)}
    if tuple(sorted(binding.assignments.items())) not in admissible:
        raise MalformedSpec(f"binding {binding.describe()} is outside the declared ranges at p={ctx.p}")


def eval_word(word: A.Word, ctx: PrimeContext, env: Mapping[str, Any]) -> list[tuple[str, int]]:
    out = []
    for g, e in word:
        k = _int(evaluate(e, ctx, env), e)
        if k:
            out.append((g, k))
    return out

