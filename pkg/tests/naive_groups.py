"""Brute-force reference models used as test oracles.

Everything here works on explicit element sets and multiplication tables
of at most a few thousand elements.  None of it shares code with the
package's collector, table kernels or subgroup machinery.
"""

from __future__ import annotations

import itertools

import numpy as np


def _letters(v):
    out = []
    for k, e in enumerate(v):
        out += [k] * int(e)
    return out


def rewrite(pres, letters: list[int]) -> tuple[int, ...]:
    """Normal form of a positive word by naive string rewriting.

    Rules: a_j a_i -> a_i a_j [a_j, a_i] for j > i, and p equal adjacent
    letters a_i ... a_i -> (a_i^p).  Terminates for any presentation whose
    right-hand sides lie below their generators.
    """
    p, n = pres.p, pres.n
    w = list(letters)
    while True:
        for k in range(len(w) - 1):
            if w[k] > w[k + 1]:
                j, i = w[k], w[k + 1]
                c = pres.comm_rhs.get((j + 1, i + 1), (0,) * n)
                w[k:k + 2] = [i, j] + _letters(c)
                break
        else:
            for k in range(len(w) - p + 1):
                if w[k] == w[k + p - 1] and all(x == w[k] for x in w[k:k + p]):
                    w[k:k + p] = _letters(pres.power_rhs[w[k]])
                    break
            else:
                v = [0] * n
                for x in w:
                    v[x] += 1
                return tuple(v)


def code(v, p) -> int:
    return sum(int(e) * p ** k for k, e in enumerate(v))


def vector(c: int, p: int, n: int) -> tuple[int, ...]:
    return tuple((c // p ** k) % p for k in range(n))


class NaiveGroup:
    """Right-regular permutation model built from a presentation by rewriting."""

    def __init__(self, pres):
        self.pres = pres
        self.p, self.n = p, n = pres.p, pres.n
        self.N = N = p ** n
        self.elements = [vector(c, p, n) for c in range(N)]
        self.right = np.array([[code(rewrite(pres, _letters(v) + [k]), p) for v in self.elements]
                               for k in range(n)], dtype=np.int64)

    def perm_of_word(self, v) -> np.ndarray:
        x = np.arange(self.N)
        for k in _letters(v):
            x = self.right[k][x]
        return x

    def relations_hold(self) -> bool:
        """True iff the generator permutations satisfy every defining relation,
        which for a transitive action on p^n points means the presentation is
        consistent."""
        n, p = self.n, self.p
        gens = [self.right[k] for k in range(n)]

        def power(perm, e):
            x = np.arange(self.N)
            for _ in range(e):
                x = perm[x]
            return x

        for i in range(n):
            if not np.array_equal(power(gens[i], p), self.perm_of_word(self.pres.power_rhs[i])):
                return False
        for j in range(n):
            for i in range(j):
                gj, gi = gens[j], gens[i]
                # x -> x a_j a_i  versus  x -> x a_i a_j c
                lhs = gi[gj]
                rhs = self.perm_of_word(self.pres.comm_rhs.get((j + 1, i + 1), (0,) * n))[gj[gi]]
                if not np.array_equal(lhs, rhs):
                    return False
        return True

    def table(self) -> np.ndarray:
        T = np.empty((self.N, self.N), np.int64)
        for c, v in enumerate(self.elements):
            T[:, c] = self.perm_of_word(v)
        return T


class FiniteGroup:
    """A group given by its full multiplication table (identity = element 0)."""

    def __init__(self, T: np.ndarray, p: int, generators):
        self.T = T
        self.N = T.shape[0]
        self.p = p
        self.gens = list(generators)
        assert np.array_equal(T[0], np.arange(self.N))
        self.inv = np.argmax(T == 0, axis=1)

    def mul(self, x, y):
        return self.T[x, y]

    def comm(self, x, y):
        return self.T[self.T[self.inv[x], self.inv[y]], self.T[x, y]]

    def power(self, x, k):
        out = np.zeros_like(np.asarray(x))
        for _ in range(k):
            out = self.T[out, x]
        return out

    def closure(self, seeds) -> frozenset[int]:
        seeds = sorted(set(int(s) for s in np.ravel(seeds)) | {0})
        H = np.zeros(self.N, bool)
        H[seeds] = True
        while True:
            members = np.flatnonzero(H)
            prod = self.T[np.ix_(members, np.array(seeds))].ravel()
            new = H.copy()
            new[prod] = True
            if new.sum() == H.sum():
                return frozenset(members.tolist())
            H = new
            seeds = sorted(set(seeds) | set(np.flatnonzero(H).tolist()))

    def all(self) -> frozenset[int]:
        return frozenset(range(self.N))

    def centre(self) -> frozenset[int]:
        x = np.arange(self.N)
        ok = np.ones(self.N, bool)
        for g in self.gens:
            ok &= self.T[x, g] == self.T[g, x]
        return frozenset(np.flatnonzero(ok).tolist())

    def commutator_subgroup(self, A, B) -> frozenset[int]:
        a = np.array(sorted(A))
        b = np.array(sorted(B))
        xs, ys = np.meshgrid(a, b, indexing="ij")
        return self.closure(self.comm(xs.ravel(), ys.ravel()))

    def derived(self):
        return self.commutator_subgroup(self.all(), self.all())

    def lower_central_series(self):
        series = [self.all()]
        while True:
            nxt = self.commutator_subgroup(series[-1], self.all())
            if nxt == series[-1]:
                return series
            series.append(nxt)
            if len(nxt) == 1:
                return series

    def upper_central_series(self):
        series = [frozenset({0})]
        x = np.arange(self.N)
        while len(series[-1]) < self.N:
            Z = np.zeros(self.N, bool)
            Z[list(series[-1])] = True
            ok = np.ones(self.N, bool)
            for g in self.gens:
                ok &= Z[self.comm(x, np.full(self.N, g))]
            nxt = frozenset(np.flatnonzero(ok).tolist())
            if nxt == series[-1]:
                break
            series.append(nxt)
        return series

    def agemo(self, i: int) -> frozenset[int]:
        x = np.arange(self.N)
        for _ in range(i):
            x = self.power(x, self.p)
        return self.closure(x)

    def classes(self) -> list[frozenset[int]]:
        seen = np.zeros(self.N, bool)
        out = []
        for x in range(self.N):
            if seen[x]:
                continue
            orbit = {x}
            frontier = [x]
            while frontier:
                y = frontier.pop()
                for g in self.gens:
                    z = int(self.T[self.T[self.inv[g], y], g])
                    if z not in orbit:
                        orbit.add(z)
                        frontier.append(z)
            for y in orbit:
                seen[y] = True
            out.append(frozenset(orbit))
        return out

    def is_associative_on(self, triples) -> bool:
        a, b, c = (np.asarray(t) for t in zip(*triples))
        return bool(np.array_equal(self.T[self.T[a, b], c], self.T[a, self.T[b, c]]))


def heisenberg_matrices(p: int):
    """Upper unitriangular 3x3 matrices over F_p as (a, b, c) for [[1,a,c],[0,1,b],[0,0,1]]."""
    elems = list(itertools.product(range(p), repeat=3))

    def mul(x, y):
        a, b, c = x
        d, e, f = y
        return ((a + d) % p, (b + e) % p, (c + f + a * e) % p)
    return elems, mul


def random_presentation(rng, p: int, n: int, density: float = 0.35):
    """Random right-hand sides below each generator (not necessarily consistent)."""
    from p6groups.pcgroup import PcPresentation

    def below(i):
        v = [0] * n
        for k in range(i):
            if rng.random() < density:
                v[k] = int(rng.integers(1, p))
        return tuple(v)
    powers = tuple(below(i) for i in range(n))
    comms = {}
    for j in range(n):
        for i in range(j):
            v = below(i)
            if any(v):
                comms[(j + 1, i + 1)] = v
    return PcPresentation(n, p, powers, comms)


def random_consistent_cases(count: int, seed: int = 2024):
    """Random presentations of order at most 5^4 with their rewriting models,
    kept when the model confirms consistency (the package is not consulted)."""
    rng = np.random.default_rng(seed)
    shapes = [(3, 3), (3, 4), (3, 5), (5, 2), (5, 3), (5, 4)]
    found = []
    while len(found) < count:
        p, n = shapes[len(found) % len(shapes)]
        pres = random_presentation(rng, p, n, density=float(rng.uniform(0.2, 0.6)))
        model = NaiveGroup(pres)
        if model.relations_hold():
            found.append((pres, model))
    return found
