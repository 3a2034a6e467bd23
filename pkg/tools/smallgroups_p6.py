"""Reader for the order-p^6 section of the GAP SmallGroups library.

Development tool only: it decodes ``small9/sml1.z`` (the packed family
data) and re-evaluates the parameter codes of ``small9/smlgp9.g`` so the
shipped ``.p6`` transcriptions can be generated and cross-checked.  Point
``--gap`` at the ``smallgrp`` package directory (or at a directory holding
``sml1.z``).
"""

from __future__ import annotations

import gzip
import re
from dataclasses import dataclass
from math import gcd
from pathlib import Path

RELS = [f"q{i}^p" for i in range(1, 7)]
for _j in range(2, 7):
    for _i in range(1, _j):
        RELS.append(f"[q{_i},q{_j}]")

CONDITIONS = {
    0: "all", 1: "p%3==1", 2: "p%4==1", 3: "p%4==3", 4: "p%5==1",
    5: "p==5", 6: "p!=5", 7: "p!=5&p%4==1", 8: "p!=5&p%3==2",
}


def condition_holds(c1: int, p: int) -> bool:
    return (c1 == 0 or c1 == 1 and p % 3 == 1 or c1 == 2 and p % 4 == 1
            or c1 == 3 and p % 4 == 3 or c1 == 4 and p % 5 == 1
            or c1 == 5 and p == 5 or c1 == 6 and p != 5
            or c1 == 7 and p != 5 and p % 4 == 1
            or c1 == 8 and p != 5 and p % 3 == 2)


def member_count(c2: int, p: int) -> int:
    g4 = gcd(p - 1, 4)
    table = {
        6: p, 7: p - 1, 8: p - 2, 9: p - 3, 10: p - 3 + g4 // 2, 11: (p - 1) // 2,
        12: (p - 3) // 2, 13: 2 * p - 2, 14: 2 * p - 4, 15: p * (p - 1) // 2,
        16: (p - 1) * (p - 1) // 2,
        17: (2 * p * (p - 1) - 11 * p + (p - 4) * g4 + 23) // 4,
        18: (2 * p * (p - 1) + 3 * p + (-p + 2) * g4 - 7) // 4,
        19: (p - 2) * (p - 1) // 2, 20: (p - 2) * (p - 1) // 2 - 1,
        21: (p - 2) * (p - 1) // 2 + 1,
    }
    return c2 if c2 <= 5 else table[c2]


@dataclass
class Member:
    c1: int
    c2: int
    rels: list  # [(relation index 1..21, [(gen, code), ...]), ...]

    def count(self, p: int) -> int:
        return member_count(self.c2, p) if condition_holds(self.c1, p) else 0


@dataclass
class Row:
    class_bound: int
    unbound: list  # relation indices 1..21
    base: list     # [(relation index, [(gen, code), ...])]
    members: list


def _split_word(n):
    l = n % 3
    n //= 3
    w = []
    for _ in range(l):
        g = n % 7
        n //= 7
        c = n % 50
        n //= 50
        w.append((g, c))
    return w, n


def decode_row(entry) -> Row:
    n1, n2, mems = entry
    cb, n = n1 % 7, n1 // 7
    unbound = []
    while n > 0:
        unbound.append(n % 22)
        n //= 22
    base, n = [], n2
    while n > 0:
        ind = n % 22
        w, n = _split_word(n // 22)
        base.append((ind, w))
    members = []
    for m in mems:
        c1, m = m % 9, m // 9
        c2, m = m % 22, m // 22
        rels = []
        while m > 0:
            ind = m % 22
            w, m = _split_word(m // 22)
            rels.append((ind, w))
        members.append(Member(c1, c2, rels))
    return Row(cb, unbound, base, members)


def load(gap_dir: str | Path) -> dict[int, list[Row]]:
    """Family index (2..43) -> rows, as stored in sml1.z."""
    gap_dir = Path(gap_dir)
    for cand in (gap_dir / "sml1.z", gap_dir / "sml1.z.gz",
                 gap_dir / "small9" / "sml1.z", gap_dir / "small9" / "sml1.z.gz"):
        if cand.exists():
            raw = cand.read_bytes()
            if cand.suffix == ".gz":
                raw = gzip.decompress(raw)
            break
    else:
        raise FileNotFoundError(f"sml1.z not found under {gap_dir}")
    src = re.sub(r"#[^\n]*", "", raw.decode())
    body = src[src.index(":=") + 2:].strip().rstrip(";")
    body = re.sub(r"\[\s*,", "[ None,", body)
    lib = eval(body, {"__builtins__": {}}, {"None": None})
    return {phi: [decode_row(e) for e in fam] for phi, fam in enumerate(lib, 1) if fam}


class CodeEvaluator:
    """Port of the exponent-code function of smlgp9.g (stateful, like the original)."""

    def __init__(self, p: int):
        self.p = p
        self.squares = {x * x % p for x in range(p)}
        nqr = 2
        while nqr in self.squares:
            nqr += 1
        self.nqr = nqr
        self.nqrm = pow(nqr, p - 2, p)
        self.pr = next(a for a in range(2, p) if all(pow(a, (p - 1) // q, p) != 1
                                                        for q in _primes(p - 1)))
        self.active_cache = None
        self.active_sub = None
        self.list_cache = []
        self.sub_cache = []
        self.sub_len = []
        self.exp_cache = None
        self.epx = self.epy = None

    def _ep(self):
        p = self.p
        if self.epx is None:
            x, y = 1, 0
            while True:
                y += 1
                if y == p:
                    x, y = x + 1, 1
                if (x * x - self.nqrm * y * y) % p == self.nqrm:
                    break
            self.epx, self.epy = x, y

    def __call__(self, j2: int, ii):
        p, pr, nqr, nqrm, sq = self.p, self.pr, self.nqr, self.nqrm, self.squares
        if j2 in (20, 21, 45, 46):
            self._ep()
        if j2 == 0:
            return -1
        if j2 <= 2:
            return j2
        if j2 <= 7:
            return j2 + ii - 5
        if j2 == 8:
            return -ii + 1
        if j2 == 9:
            return 0 if ii == 1 else -ii
        if j2 <= 21:
            if self.active_cache != j2:
                self.active_cache = j2
                self._fill(j2)
                self.active_sub = None
            if j2 in (11, 13, 16, 19, 21):
                x = 0
                while ii > self.sub_len[x]:
                    ii -= self.sub_len[x]
                    x += 1
                if x != self.active_sub:
                    self.active_sub = x
                    self._fill_sub(j2, self.sub_cache[x])
            self.exp_cache = self.list_cache[ii - 1]
            return self.exp_cache[0]
        if j2 <= 24:
            return self.exp_cache[j2 - 21]
        if j2 == 25:
            return nqr
        if j2 == 26:
            return nqrm
        if j2 == 27:
            return -nqr
        if j2 == 28:
            return -nqrm
        if j2 == 29:
            return 2 * nqr
        if j2 == 30:
            return 1 if ii % 2 == 1 else nqr
        if j2 == 31:
            return 1 if ii <= 2 else nqr
        if j2 == 32:
            return -1 if ii == 1 else -nqrm
        if j2 == 33:
            return nqr * ii
        if j2 == 34:
            return nqrm * ii
        if j2 == 35:
            return pow(pr, ii, p)
        if j2 == 36:
            return 2 * pow(pr, ii, p) % p
        if j2 == 37:
            return -pow(pr, ii, p) % p
        if j2 == 38:
            return (-1 + pow(pr, ii * 2 - 1, p)) % p
        if j2 == 39:
            x, y = 1, 0
            while True:
                y += 1
                if y == p:
                    x, y = x + 1, 1
                if (x * x - nqrm * y * y) % p == ii + 1:
                    break
            self.exp_cache = [None, -nqrm * y, y, 1 + x]
            return 1 - x
        if j2 == 40:
            if ii < p:
                self.exp_cache = [None, 0 if ii == 1 else ii]
                return 1
            self.exp_cache = [None, ii - p if ii < p + nqrm else ii - p + 1]
            return nqr
        if j2 == 41:
            if ii < p:
                self.exp_cache = [None, ii]
                return 1
            self.exp_cache = [None, ii - (p - 1)]
            return nqr
        if j2 == 42:
            if ii <= p - 2:
                self.exp_cache = [None, ii + 1]
                return 1
            self.exp_cache = [None, ii - p + 3]
            return nqr
        if j2 == 43:
            if ii <= (p - 1) // 2:
                self.exp_cache = [None, ii]
                return 1
            self.exp_cache = [None, ii - (p - 1) // 2]
            return nqr
        if j2 == 44:
            x = (ii - 1) // ((p - 1) // 2)
            self.exp_cache = [None, ii - x * (p - 1) // 2]
            return x
        if j2 == 45:
            self.exp_cache = [None, -self.epx, self.epx, self.epy]
            return -nqrm * self.epy % p
        if j2 == 46:
            self.exp_cache = [None, ii - self.epx, (ii + self.epx) % p, self.epy]
            return -nqrm * self.epy % p
        if j2 == 47:
            return -((ii - 2) * pow(3, 3, 5) % 5)
        if j2 <= 49:
            f = 1 if j2 == 48 else nqrm
            x, y = 0, 0
            while True:
                y += 1
                if y == p:
                    x, y = x + 1, 0
                if (x * x - f * y * y) % p == ii:
                    break
            self.exp_cache = [None, -y + 1]
            return -x - 1
        raise ValueError(f"unknown exponent code {j2}")

    def _ks(self, hi):
        return [pow(self.pr, x, self.p) for x in range(0, hi + 1)]

    def _fill(self, j2):
        p, nqr, nqrm, sq = self.p, self.nqr, self.nqrm, self.squares
        pairs = [(r, s) for r in (1, nqr) for s in range(1, p)]
        if j2 == 10:
            self.list_cache = [x for x in pairs if (1 + 4 * x[0] * x[1]) % p != 0
                               and (1 + 4 * x[0] * x[1]) % p in sq]
        elif j2 in (11, 13):
            self.sub_cache = pairs
            self.sub_len = [len(self._rsk(j2, r, s)) for r, s in pairs]
        elif j2 == 12:
            self.list_cache = [x for x in pairs if (1 + 4 * x[0] * x[1]) % p not in sq]
        elif j2 == 14:
            self.list_cache = [(r, s) for r in (1, nqr) for s in range(0, p)
                               if (1 + 4 * r * s) % p == 0]
        elif j2 == 15:
            self.list_cache = [(r, t, k) for r in (1, nqr)
                               for k in [pow(self.pr, x, p) for x in range(1, (p - 3) // 2 + 1)]
                               for t in range(p) if (4 * r * t + (1 - k) ** 2) % p == 0]
        elif j2 == 16:
            x = p // 4
            self.sub_cache = list(range(1, p))
            self.sub_len = [(p - 3) // 2] * x + [(p - 1) // 2] * (p - 1 - 2 * x) + [(p + 1) // 2] * x
        elif j2 == 17:
            self.list_cache = [(r, gg * pow(r, p - 2, p) % p, gg) for r in (1, nqr)
                               for gg in [pow(self.pr, x, p) for x in range(0, (p - 3) // 2 + 1)]
                               if not (p % 4 == 3 and r == nqr and gg == 1)]
        elif j2 == 18:
            self.list_cache = [(nqrm * x % p, x) for x in range(1, p) if x * x % p != p - nqr]
        elif j2 == 19:
            if p % 4 == 1:
                self.sub_cache = list(range(1, p))
                self.sub_len = [(p - 1) // 2] * (p - 1)
                for x in range(2, p - 1):
                    if (x * x - 1) * pow(nqrm, p - 2, p) % p in sq:
                        self.sub_len[x - 1] = (p - 3) // 2
            else:
                self.sub_cache = list(range(1, (p - 1) // 2 + 1))
                self.sub_len = [p - 1] * ((p - 1) // 2)
                for x in range(2, (p - 1) // 2 + 1):
                    if (x * x - 1) * pow(nqrm, p - 2, p) % p in sq:
                        self.sub_len[x - 1] = p - 3
        elif j2 == 20:
            cart = ([l for l in range(1, p) if l * l % p != p - 1] if p % 4 == 1
                    else list(range(1, (p - 1) // 2 + 1)))
            self.list_cache = [(nqrm * (c - self.epy) % p, -self.epx, self.epx, (c + self.epy) % p)
                               for c in cart]
        elif j2 == 21:
            if p % 4 == 1:
                self.sub_cache = list(range(1, (p - 1) // 2 + 1))
                self.sub_len = [p - 1] * ((p - 1) // 2)
                for x in range(1, (p - 1) // 2 + 1):
                    if (x * x * nqr - 1) % p in sq:
                        self.sub_len[x - 1] = p - 3
            else:
                self.sub_cache = list(range(1, p))
                self.sub_len = [(p - 1) // 2] * (p - 1)
                for x in range(1, p):
                    if (x * x * nqr - 1) % p in sq:
                        self.sub_len[x - 1] = (p - 3) // 2

    def _rsk(self, j2, r, s):
        p, nqr, sq = self.p, self.nqr, self.squares
        out = []
        for k in self._ks((p - 1) // 2):
            d = ((1 - k) ** 2 + 4 * r * s) % p
            if k == r * s % p:
                continue
            if j2 == 11 and not (d != 0 and d in sq):
                continue
            if j2 == 13 and d in sq:
                continue
            if r == nqr and k in (1, p - 1) and (-s) % p in sq:
                continue
            out.append((r, s, k))
        return out

    def _fill_sub(self, j2, x):
        p, nqrm = self.p, self.nqrm
        if j2 in (11, 13):
            self.list_cache = self._rsk(j2, *x)
        elif j2 == 16:
            self.list_cache = [(x, z - x) for z in range(0, (p - 1) // 2 + 1)
                               if x != z and 2 * x % p != z]
        elif j2 == 19:
            k = (p - 1) // 2 if p % 4 == 1 else p - 1
            self.list_cache = [(nqrm * z % p, x - 1, x + 1, z) for z in range(1, k + 1)
                               if (x * x - nqrm * z * z) % p != 1]
        elif j2 == 21:
            k = p - 1 if p % 4 == 1 else (p - 1) // 2
            self.list_cache = [(nqrm * (z - self.epy) % p, x - self.epx, (x + self.epx) % p,
                                (z + self.epy) % p) for z in range(1, k + 1)
                               if (x * x - nqrm * z * z) % p != nqrm]


def _primes(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def relations(row: Row, member: Member, ii: int, ev: CodeEvaluator):
    """Concrete relations of one group: {relation index: [(gen, exponent), ...]}.

    Base relations of the row start as trivial; unbound ones are dropped.
    """
    rels = {k: [] for k in range(1, 22) if k not in row.unbound}
    # GAP divides the free relator by each word in turn, so later words go in front
    for ind, w in row.base:
        rels[ind] = [(g, ev(c, None)) for g, c in w] + rels[ind]
    for ind, w in member.rels:
        rels[ind] = [(g, ev(c, ii)) for g, c in w] + rels[ind]
    return rels


def family_groups(rows: list[Row], p: int):
    """Yield (row index, member index, ii, relations) in library order."""
    ev = CodeEvaluator(p)
    for j, row in enumerate(rows):
        for k, mem in enumerate(row.members):
            for ii in range(1, mem.count(p) + 1):
                yield j, k, ii, relations(row, mem, ii, ev)


def family_sizes(p: int) -> list[int]:
    """Per-family counts as tabulated in smlgp9.g (families 1..43)."""
    p2 = (p - 1) // 2
    pp2 = p * p2
    a, b, c = gcd(3, p - 1), gcd(4, p - 1), gcd(5, p - 1)
    return [11, 31, 32, 3 * p + 32, 7, 2 * p + 21, 21, p + 5, 3 * a + 7,
            3 * a + 3 * b + 4, 2 * p + 10, p + 13, p + 10, 3, p + 3, p + a + 12, 4 * p + a + 30,
            3 * p + a + b + 9, 3 * pp2 + 6 * p + p2 + 11, 5 * p + a + b + 13,
            3 * pp2 + 4 * p - p2 + 2, 7, p + 4 * a + b + 5, a + 3, p2 + 2, p2 + 2, a + b + 3,
            p, p, 2 * a + 4, 7, 5, 6, 3, b + 2, 2 * a + b + 1, b + 4, p + b + c,
            p + 2 * a + c, a + 2, a + 1, p + 1, p]
