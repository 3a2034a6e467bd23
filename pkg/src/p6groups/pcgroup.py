"""Power-commutator presentations and normal-form arithmetic.

Generators are numbered 1..n along a central series with generator 1 the
most central.  A presentation gives every a_i^p and every commutator
[a_j, a_i] (j > i) as a normal word in generators strictly below i; the
commutator convention is [x, y] = x^-1 y^-1 x y.  Normal forms are
exponent vectors (e_1, ..., e_n) standing for a_1^e_1 ... a_n^e_n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import _kernels as K
from .errors import InvalidArgument, ResourceBudgetExceeded, UncheckedPresentation
from .numtheory import PrimeContext, is_prime

MAX_GENERATORS = 8
DEFAULT_BUDGET = 10**8

ExponentVector = tuple[int, ...]


def identity(n: int) -> ExponentVector:
    return (0,) * n


@dataclass(frozen=True)
class PcPresentation:
    """Relations of a pc presentation with relative orders all equal to p.

    ``power_rhs[i]`` is the normal form of a_{i+1}^p.  ``comm_rhs`` maps a
    1-based pair (j, i) with j > i to the normal form of [a_j, a_i];
    missing pairs are trivial.
    """

    n: int
    p: int
    power_rhs: tuple[ExponentVector, ...]
    comm_rhs: Mapping[tuple[int, int], ExponentVector] = field(default_factory=dict)
    names: tuple[str, ...] = ()

    def __post_init__(self):
        n, p = self.n, self.p
        if not 1 <= n <= MAX_GENERATORS:
            raise InvalidArgument(f"generator count must be in [1, {MAX_GENERATORS}], got {n}")
        if not is_prime(p):
            raise InvalidArgument(f"{p} is not prime")
        powers = tuple(tuple(int(x) % p for x in v) for v in self.power_rhs)
        if len(powers) != n or any(len(v) != n for v in powers):
            raise InvalidArgument("power_rhs must hold n vectors of length n")
        for i, v in enumerate(powers):
            if any(v[i:]):
                raise InvalidArgument(f"a{i + 1}^p must lie in generators below a{i + 1}")
        comms = {}
        for (j, i), v in dict(self.comm_rhs).items():
            if not 1 <= i < j <= n:
                raise InvalidArgument(f"commutator key ({j},{i}) must satisfy n >= j > i >= 1")
            v = tuple(int(x) % p for x in v)
            if len(v) != n:
                raise InvalidArgument("commutator right-hand sides must have length n")
            if any(v[i - 1:]):
                raise InvalidArgument(f"[a{j},a{i}] must lie in generators below a{i}")
            if any(v):
                comms[(j, i)] = v
        names = tuple(self.names) or tuple(f"a{k}" for k in range(1, n + 1))
        if len(names) != n:
            raise InvalidArgument("names must have length n")
        object.__setattr__(self, "power_rhs", powers)
        object.__setattr__(self, "comm_rhs", dict(sorted(comms.items())))
        object.__setattr__(self, "names", names)

    @property
    def weights(self) -> tuple[int, ...]:
        """Position of each generator in the composition series."""
        return tuple(range(1, self.n + 1))

    def commutator_rhs(self, j: int, i: int) -> ExponentVector:
        return self.comm_rhs.get((j, i), identity(self.n))

    @classmethod
    def elementary_abelian(cls, n: int, p: int) -> PcPresentation:
        return cls(n, p, (identity(n),) * n)


def _letters(v: Sequence[int]) -> tuple[list[int], list[int]]:
    gs = [t for t, e in enumerate(v) if e]
    return gs, [int(v[t]) for t in gs]


class _Tables:
    """numpy letter tables consumed by the compiled kernels."""

    def __init__(self, pres: PcPresentation):
        n, p = pres.n, pres.p
        self.p = p
        self.n = n
        self.pw_g = np.zeros((n, n), np.int64)
        self.pw_e = np.zeros((n, n), np.int64)
        self.pw_n = np.zeros(n, np.int64)
        self.cm_g = np.zeros((n, n, n), np.int64)
        self.cm_e = np.zeros((n, n, n), np.int64)
        self.cm_n = np.zeros((n, n), np.int64)
        self.jmax = np.arange(n, dtype=np.int64)
        for i, v in enumerate(pres.power_rhs):
            gs, es = _letters(v)
            self.pw_n[i] = len(gs)
            self.pw_g[i, :len(gs)] = gs
            self.pw_e[i, :len(gs)] = es
        for (j, i), v in pres.comm_rhs.items():
            gs, es = _letters(v)
            j0, i0 = j - 1, i - 1
            self.cm_n[j0, i0] = len(gs)
            self.cm_g[j0, i0, :len(gs)] = gs
            self.cm_e[j0, i0, :len(gs)] = es
            self.jmax[i0] = max(self.jmax[i0], j0)
        self.iv_g = np.zeros((n, n), np.int64)
        self.iv_e = np.zeros((n, n), np.int64)
        self.iv_n = np.zeros(n, np.int64)
        self.inverses = np.zeros((n, n), np.int64)
        # a_i^-1 = a_i^(p-1) (a_i^p)^-1, and a_i^p lies below a_i
        for i in range(n):
            w = np.array(pres.power_rhs[i], np.int64)
            gs = [i]
            es = [p - 1]
            for t in range(i - 1, -1, -1):
                for _ in range(int(w[t])):
                    gs.extend(int(x) for x in self.iv_g[t, :self.iv_n[t]])
                    es.extend(int(x) for x in self.iv_e[t, :self.iv_n[t]])
            inv = self.collect(gs, es)
            self.inverses[i] = inv
            lg, le = _letters(inv)
            self.iv_n[i] = len(lg)
            self.iv_g[i, :len(lg)] = lg
            self.iv_e[i, :len(lg)] = le

    @property
    def args(self):
        return (self.p, self.pw_g, self.pw_e, self.pw_n,
                self.cm_g, self.cm_e, self.cm_n, self.jmax)

    def collect(self, gens, exps) -> np.ndarray:
        return K.collect_letters(np.asarray(gens, np.int64), np.asarray(exps, np.int64),
                                 self.p, self.n, *self.args[1:])


@dataclass
class ConsistencyReport:
    consistent: bool
    order: int | None
    checked: int
    condition: str | None = None
    left: ExponentVector | None = None
    right: ExponentVector | None = None

    def __bool__(self):
        return self.consistent

    def describe(self) -> str:
        if self.consistent:
            return f"consistent ({self.checked} overlaps), order {self.order}"
        return f"inconsistent at {self.condition}: {self.left} != {self.right}"


class PcGroup:
    """A compiled presentation; arithmetic requires a passed consistency check.

    Bulk operations on element codes build right-multiplication tables
    (consistent groups with p^n at most ``TABLE_LIMIT``); single-element
    operations use those tables once they exist and collect words otherwise.
    """

    TABLE_LIMIT = 2 * 10**7

    def __init__(self, presentation: PcPresentation, context: PrimeContext | None = None,
                 *, allow_unverified: bool = False, budget: int = DEFAULT_BUDGET):
        if budget <= 0:
            raise InvalidArgument("budget must be positive")
        self.presentation = presentation
        self.n = presentation.n
        self.p = presentation.p
        if context is not None and context.p != self.p:
            raise InvalidArgument("context prime differs from presentation prime")
        self.context = context
        self.allow_unverified = allow_unverified
        self.budget = budget
        self.consistent: bool | None = None
        self._t = _Tables(presentation)
        self._mt = None
        self._place = self.p ** np.arange(self.n, dtype=np.int64)

    # -- bookkeeping --------------------------------------------------

    @classmethod
    def from_presentation(cls, presentation, context=None, **kw) -> PcGroup:
        """Compile and check; raises UncheckedPresentation if inconsistent."""
        g = cls(presentation, context, **kw)
        report = consistency_check(g)
        if not report:
            raise UncheckedPresentation(report.describe())
        return g

    @property
    def order(self) -> int:
        if not self.consistent:
            raise UncheckedPresentation("order is only defined after a passed consistency check")
        return self.p ** self.n

    @property
    def identity(self) -> ExponentVector:
        return identity(self.n)

    def generator(self, i: int) -> ExponentVector:
        self._check_index(i)
        return tuple(int(k == i - 1) for k in range(self.n))

    @property
    def generators(self) -> list[ExponentVector]:
        return [self.generator(i) for i in range(1, self.n + 1)]

    def _check_index(self, i):
        if not 1 <= i <= self.n:
            raise InvalidArgument(f"generator index {i} out of range 1..{self.n}")

    def _guard(self):
        if not self.consistent and not self.allow_unverified:
            raise UncheckedPresentation(
                "presentation has not passed consistency_check (use allow_unverified to override)")

    def _vec(self, x) -> np.ndarray:
        a = np.asarray(x, np.int64)
        if a.shape != (self.n,) or a.min(initial=0) < 0 or a.max(initial=0) >= self.p:
            raise InvalidArgument(f"not an exponent vector for this group: {x!r}")
        return a

    def _check_budget(self):
        if self.p ** self.n > self.budget:
            raise ResourceBudgetExceeded(
                f"p^n = {self.p ** self.n} exceeds the enumeration budget {self.budget}")

    # -- multiplication tables ------------------------------------------

    def _tables(self):
        """(R, Ri) or None when tables are unavailable."""
        if self._mt is None and self.consistent and self.p ** self.n <= self.TABLE_LIMIT:
            t = self._t
            comms = np.zeros((self.n, self.n, self.n), np.int64)
            for (j, i), v in self.presentation.comm_rhs.items():
                comms[j - 1, i - 1] = v
            powers = np.array(self.presentation.power_rhs, np.int64).reshape(self.n, self.n)
            self._mt = K.build_tables(t.p, powers, comms)
        return self._mt

    def _require_tables(self):
        self._guard()
        self._check_budget()
        mt = self._tables()
        if mt is None:
            raise ResourceBudgetExceeded(
                f"bulk arithmetic needs p^n <= {self.TABLE_LIMIT} and a consistent presentation")
        return mt

    def to_codes(self, X) -> np.ndarray:
        """Element codes sum(e_i p^(i-1)) of exponent-vector rows."""
        return np.atleast_2d(np.asarray(X, np.int64)) @ self._place

    def from_codes(self, codes) -> np.ndarray:
        codes = np.asarray(codes, np.int64)
        return (codes[..., None] // self._place) % self.p

    def _code(self, x) -> int:
        return int(self._vec(x) @ self._place)

    def _vector(self, c) -> ExponentVector:
        return tuple(int(v) for v in self.from_codes(int(c)))

    # -- element arithmetic ------------------------------------------

    def collect(self, word: Iterable[tuple[int, int]]) -> ExponentVector:
        """Normal form of a word of (1-based generator, integer exponent) pairs."""
        self._guard()
        word = list(word)
        mt = self._mt
        if mt is None:
            return self._collect(word)
        R, Ri = mt
        c = np.zeros(1, np.int64)
        for i, e in word:
            self._check_index(i)
            g = np.array([self._place[i - 1]])
            if e < 0:
                g = K.t_inv(Ri, g, self.p, self.n)
            c = K.t_mul(R, c, K.t_pow(R, g, abs(int(e)), self.p, self.n), self.p, self.n)
        return self._vector(c[0])

    def _collect(self, word) -> ExponentVector:
        """Collect with the rewriting rules directly (no consistency guard)."""
        gs, es = [], []
        t = self._t
        for i, e in word:
            self._check_index(i)
            e = int(e)
            if e >= 0:
                if e:
                    gs.append(i - 1)
                    es.append(e)
            else:
                for _ in range(-e):
                    k = t.iv_n[i - 1]
                    gs.extend(int(x) for x in t.iv_g[i - 1, :k])
                    es.extend(int(x) for x in t.iv_e[i - 1, :k])
        return tuple(int(x) for x in t.collect(gs, es))

    def multiply(self, x, y) -> ExponentVector:
        self._guard()
        mt = self._mt
        if mt is None:
            return self._collect([(i + 1, e) for i, e in enumerate(self._vec(x))]
                                 + [(i + 1, e) for i, e in enumerate(self._vec(y))])
        c = K.t_mul(mt[0], np.array([self._code(x)]), np.array([self._code(y)]), self.p, self.n)
        return self._vector(c[0])

    def inverse(self, x) -> ExponentVector:
        self._guard()
        mt = self._mt
        v = self._vec(x)
        if mt is None:
            return self._collect([(i + 1, -int(v[i])) for i in range(self.n - 1, -1, -1)])
        return self._vector(K.t_inv(mt[1], np.array([self._code(v)]), self.p, self.n)[0])

    def power(self, x, k: int) -> ExponentVector:
        self._guard()
        if k < 0:
            return self.power(self.inverse(x), -k)
        mt = self._mt
        if mt is None:
            out, base = self.identity, tuple(int(e) for e in self._vec(x))
            while k:
                if k & 1:
                    out = self.multiply(out, base)
                k >>= 1
                if k:
                    base = self.multiply(base, base)
            return out
        return self._vector(K.t_pow(mt[0], np.array([self._code(x)]), int(k), self.p, self.n)[0])

    def commutator(self, x, y) -> ExponentVector:
        """[x, y] = (yx)^-1 (xy)."""
        return self.multiply(self.inverse(self.multiply(y, x)), self.multiply(x, y))

    def conjugate(self, x, g) -> ExponentVector:
        """g^-1 x g."""
        return self.multiply(self.multiply(self.inverse(g), x), g)

    def element_order(self, x) -> int:
        self._guard()
        x = tuple(int(e) for e in self._vec(x))
        k = 1
        while any(x):
            x = self.power(x, self.p)
            k *= self.p
        return k

    # -- bulk arithmetic on element codes ------------------------------

    def all_codes(self) -> np.ndarray:
        self._require_tables()
        return np.arange(self.p ** self.n, dtype=np.int64)

    def mul_codes(self, A, B) -> np.ndarray:
        R, _ = self._require_tables()
        return K.t_mul(R, np.atleast_1d(np.asarray(A, np.int64)),
                       np.atleast_1d(np.asarray(B, np.int64)), self.p, self.n)

    def inv_codes(self, A) -> np.ndarray:
        _, Ri = self._require_tables()
        return K.t_inv(Ri, np.atleast_1d(np.asarray(A, np.int64)), self.p, self.n)

    def pow_codes(self, A, k: int) -> np.ndarray:
        R, _ = self._require_tables()
        A = np.atleast_1d(np.asarray(A, np.int64))
        if k < 0:
            A, k = self.inv_codes(A), -k
        return K.t_pow(R, A, int(k), self.p, self.n)

    def conj_codes(self, A, g: int) -> np.ndarray:
        """Codes of g^-1 a g for a fixed code g."""
        R, Ri = self._require_tables()
        ginv = int(K.t_inv(Ri, np.array([g], np.int64), self.p, self.n)[0])
        return K.t_conj(R, np.atleast_1d(np.asarray(A, np.int64)), int(g), ginv, self.p, self.n)

    def comm_codes(self, A, B) -> np.ndarray:
        R, Ri = self._require_tables()
        return K.t_comm(R, Ri, np.atleast_1d(np.asarray(A, np.int64)),
                        np.atleast_1d(np.asarray(B, np.int64)), self.p, self.n)

    def generator_codes(self) -> np.ndarray:
        return self._place.copy()

    # -- bulk arithmetic on exponent-vector arrays ----------------------

    def mul_array(self, X, Y) -> np.ndarray:
        return self.from_codes(self.mul_codes(self.to_codes(X), self.to_codes(Y)))

    def inv_array(self, X) -> np.ndarray:
        return self.from_codes(self.inv_codes(self.to_codes(X)))

    def pow_array(self, X, k: int) -> np.ndarray:
        return self.from_codes(self.pow_codes(self.to_codes(X), k))

    def conj_array(self, X, g) -> np.ndarray:
        """Rows g^-1 x g for every row x of X."""
        return self.from_codes(self.conj_codes(self.to_codes(X), self._code(g)))

    def element_array(self) -> np.ndarray:
        """All p^n normal forms as an array, in lexicographic order."""
        self._guard()
        self._check_budget()
        idx = np.arange(self.p ** self.n, dtype=np.int64)
        out = np.empty((idx.size, self.n), np.int64)
        for t in range(self.n - 1, -1, -1):
            out[:, t] = idx % self.p
            idx //= self.p
        return out

    def enumerate_elements(self) -> Iterator[ExponentVector]:
        self._guard()
        self._check_budget()
        return itertools.product(range(self.p), repeat=self.n)

    def __repr__(self):
        state = {None: "unchecked", True: "consistent", False: "inconsistent"}[self.consistent]
        return f"<PcGroup p={self.p} n={self.n} {state}>"


def consistency_check(g: PcGroup) -> ConsistencyReport:
    """Evaluate every overlap of the presentation and record the outcome on ``g``."""
    n, p, t = g.n, g.p, g._t
    pres = g.presentation

    def nf(*letters):
        gs, es = [], []
        for item in letters:
            if isinstance(item, np.ndarray):
                lg, le = _letters(item)
                gs += lg
                es += le
            else:
                gs.append(item[0])
                es.append(item[1])
        return t.collect(gs, es)

    checked = 0

    def fail(cond, a, b):
        g.consistent = False
        return ConsistencyReport(False, None, checked, cond,
                                 tuple(int(x) for x in a), tuple(int(x) for x in b))

    names = pres.names
    for k in range(n):
        for j in range(k):
            for i in range(j):
                left = nf((k, 1), (j, 1), (i, 1))
                right = nf((k, 1), nf((j, 1), (i, 1)))
                checked += 1
                if not np.array_equal(left, right):
                    return fail(f"({names[k]} {names[j]}) {names[i]} = {names[k]} ({names[j]} {names[i]})",
                                left, right)
    for j in range(n):
        for i in range(j):
            left = nf((j, p - 1), (j, 1), (i, 1))
            right = nf((j, p - 1), nf((j, 1), (i, 1)))
            checked += 1
            if not np.array_equal(left, right):
                return fail(f"({names[j]}^p) {names[i]} = {names[j]}^(p-1) ({names[j]} {names[i]})",
                            left, right)
            left = nf((j, 1), (i, p - 1), (i, 1))
            right = nf((j, 1), np.asarray(pres.power_rhs[i], np.int64))
            checked += 1
            if not np.array_equal(left, right):
                return fail(f"({names[j]} {names[i]}^(p-1)) {names[i]} = {names[j]} ({names[i]}^p)",
                            left, right)
    for i in range(n):
        left = nf((i, p - 1), (i, 1), (i, 1))
        right = nf((i, 1), np.asarray(pres.power_rhs[i], np.int64))
        checked += 1
        if not np.array_equal(left, right):
            return fail(f"({names[i]}^p) {names[i]} = {names[i]} ({names[i]}^p)", left, right)
    g.consistent = True
    return ConsistencyReport(True, p ** n, checked)
