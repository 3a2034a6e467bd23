"""Subgroups and isomorphism invariants of a compiled group.

Subgroups are held as induced generating sequences: every member has a
distinct depth (the index of its highest nonzero exponent, i.e. the least
central generator it involves) with exponent 1 there.  Membership is
decided by sifting.  Whole-group scans (centre, classes, agemo, upper
central series) run on element codes and permutation arrays.
"""

from __future__ import annotations

import weakref
from collections import Counter
from dataclasses import dataclass, field
from itertools import groupby

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InvalidArgument
from .pcgroup import ExponentVector, PcGroup


def depth(x: ExponentVector) -> int:
    """1-based index of the last nonzero exponent; 0 for the identity."""
    for k in range(len(x) - 1, -1, -1):
        if x[k]:
            return k + 1
    return 0


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: PcGroup = field(repr=False)
    igs: tuple[ExponentVector, ...]

    @property
    def order(self) -> int:
        return self.parent.p ** len(self.igs)

    @property
    def log_order(self) -> int:
        return len(self.igs)

    def __len__(self):
        return len(self.igs)

    def _by_depth(self) -> dict[int, ExponentVector]:
        return {depth(h): h for h in self.igs}

    def sift(self, x) -> ExponentVector:
        """Remainder of x after dividing out the sequence from the top down."""
        g, p = self.parent, self.parent.p
        table = self._by_depth()
        x = tuple(int(e) for e in x)
        for k in range(g.n, 0, -1):
            e = x[k - 1]
            if e and k in table:
                x = g.multiply(x, g.power(table[k], p - e))
        return x

    def __contains__(self, x) -> bool:
        return not any(self.sift(x))

    def codes(self) -> np.ndarray:
        """Sorted codes of all elements."""
        g = self.parent
        cur = np.zeros(1, np.int64)
        for h in sorted(self.igs, key=depth, reverse=True):
            hc = g.to_codes(h)
            parts = [cur]
            step = cur
            for _ in range(g.p - 1):
                step = g.mul_codes(step, hc)
                parts.append(step)
            cur = np.concatenate(parts)
        return np.sort(cur)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.p ** self.parent.n, bool)
        m[self.codes()] = True
        return m

    def key(self) -> tuple:
        """Canonical form, equal for equal subgroups."""
        return canonical(self).igs

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.parent is self.parent and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __le__(self, other: Subgroup) -> bool:
        return all(h in other for h in self.igs)


def canonical(H: Subgroup) -> Subgroup:
    """Reduce the sequence so that every member is zero at the other members' depths."""
    g, p = H.parent, H.parent.p
    table = H._by_depth()
    depths = sorted(table)
    for d in depths:
        h = table[d]
        for d2 in sorted((x for x in depths if x < d), reverse=True):
            e = h[d2 - 1]
            if e:
                h = g.multiply(h, g.power(table[d2], p - e))
        table[d] = h
    return Subgroup(g, tuple(table[d] for d in depths))


def _closure(g: PcGroup, seeds, normal: bool) -> Subgroup:
    p = g.p
    table: dict[int, ExponentVector] = {}
    queue = [tuple(int(e) for e in s) for s in seeds]
    gens = g.generators
    while queue:
        x = queue.pop()
        for k in range(g.n, 0, -1):
            e = x[k - 1]
            if not e:
                continue
            if k in table:
                x = g.multiply(x, g.power(table[k], p - e))
                continue
            x = g.power(x, pow(e, -1, p))
            table[k] = x
            queue.append(g.power(x, p))
            queue.extend(g.commutator(x, h) for h in table.values())
            if normal:
                queue.extend(g.commutator(x, a) for a in gens)
            break
    return Subgroup(g, tuple(table[k] for k in sorted(table)))


def closure(g: PcGroup, seeds) -> Subgroup:
    """Smallest subgroup containing the seeds."""
    return _closure(g, seeds, normal=False)


def normal_closure(g: PcGroup, seeds) -> Subgroup:
    return _closure(g, seeds, normal=True)


def whole_group(g: PcGroup) -> Subgroup:
    return Subgroup(g, tuple(g.generators))


def trivial(g: PcGroup) -> Subgroup:
    return Subgroup(g, ())


def closure_of_codes(g: PcGroup, codes) -> Subgroup:
    """Subgroup generated by a (possibly huge) set of element codes."""
    rest = np.unique(np.asarray(codes, np.int64))
    rest = rest[rest != 0]
    H = trivial(g)
    while rest.size:
        H = closure(g, list(H.igs) + [g._vector(rest[0])])
        rest = rest[~H.mask()[rest]]
    return H


# -- whole-group scans ---------------------------------------------------

class _Scan:
    """Per-group permutation arrays over all element codes."""

    def __init__(self, g: PcGroup):
        g._check_budget()
        # weak, since the group caches this object
        self._g = weakref.ref(g)
        self.all = g.all_codes()
        self.inv = g.inv_codes(self.all)
        R, _ = g._tables()
        # x^(a_k) = a_k^-1 x a_k, with a_k^-1 x = (x^-1 a_k)^-1
        self.conj = [R[k][self.inv[R[k][self.inv]]].astype(np.int64) for k in range(g.n)]
        self._powmap = None

    @property
    def g(self) -> PcGroup:
        return self._g()

    @property
    def powmap(self) -> np.ndarray:
        if self._powmap is None:
            self._powmap = self.g.pow_codes(self.all, self.g.p)
        return self._powmap

    def coset_labels(self, H: Subgroup) -> np.ndarray:
        """Component label of every element modulo the subgroup H (right cosets xH)."""
        N = self.all.size
        if not H.igs:
            return self.all
        rows, cols = [], []
        for h in H.igs:
            rows.append(self.all)
            cols.append(self.g.mul_codes(self.all, self.g.to_codes(h)))
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        graph = coo_matrix((np.ones(rows.size, np.int8), (rows, cols)), shape=(N, N))
        return connected_components(graph, directed=True, connection="weak")[1]


def _scan(g: PcGroup) -> _Scan:
    s = getattr(g, "_scan_cache", None)
    if s is None:
        s = _Scan(g)
        g._scan_cache = s
    return s


def center(g: PcGroup) -> Subgroup:
    s = _scan(g)
    fixed = np.ones(s.all.size, bool)
    for c in s.conj:
        fixed &= c == s.all
    return closure_of_codes(g, s.all[fixed])


def derived_subgroup(g: PcGroup) -> Subgroup:
    gens = g.generators
    seeds = [g.commutator(gens[i], gens[j]) for i in range(g.n) for j in range(i + 1, g.n)]
    return normal_closure(g, seeds)


def lower_central_series(g: PcGroup) -> list[Subgroup]:
    series = [whole_group(g)]
    gens = g.generators
    while series[-1].igs:
        nxt = normal_closure(g, [g.commutator(x, a) for x in series[-1].igs for a in gens])
        if nxt.log_order == series[-1].log_order:
            break
        series.append(nxt)
    return series


def upper_central_series(g: PcGroup) -> list[Subgroup]:
    s = _scan(g)
    series = [trivial(g)]
    while series[-1].log_order < g.n:
        lab = s.coset_labels(series[-1])
        keep = np.ones(s.all.size, bool)
        for c in s.conj:
            keep &= lab[c] == lab
        nxt = closure_of_codes(g, s.all[keep])
        if nxt.log_order == series[-1].log_order:
            break
        series.append(nxt)
    return series


def agemo(g: PcGroup, i: int) -> Subgroup:
    """Subgroup generated by the p^i-th powers of all elements."""
    if i < 0:
        raise InvalidArgument("agemo index must be non-negative")
    if i == 0:
        return whole_group(g)
    s = _scan(g)
    x = s.all
    for _ in range(i):
        x = s.powmap[x]
    return closure_of_codes(g, x)


def agemo_series(g: PcGroup) -> list[Subgroup]:
    """℧^0 = G, ℧^1, ... down to the trivial subgroup."""
    s = _scan(g)
    series = [whole_group(g)]
    x = s.all
    while series[-1].igs:
        x = np.unique(s.powmap[x])
        series.append(closure_of_codes(g, x))
    return series


def conjugacy_classes(g: PcGroup) -> dict[int, int]:
    """Class size -> number of classes."""
    s = _scan(g)
    N = s.all.size
    rows = np.tile(s.all, g.n)
    cols = np.concatenate(s.conj)
    graph = coo_matrix((np.ones(rows.size, np.int8), (rows, cols)), shape=(N, N))
    _, labels = connected_components(graph, directed=True, connection="weak")
    sizes = Counter(np.bincount(labels).tolist())
    return dict(sorted(sizes.items()))


def element_orders_max(g: PcGroup) -> int:
    """Largest element order, found by iterating the p-power map over every element."""
    s = _scan(g)
    x, k = s.all, 1
    while x.any():
        x = s.powmap[x]
        k *= g.p
    return k


# -- order type and profile ------------------------------------------------

def conjugate_partition(parts) -> tuple[int, ...]:
    parts = [x for x in parts if x > 0]
    if not parts:
        return ()
    return tuple(sum(1 for x in parts if x >= j) for j in range(1, max(parts) + 1))


def render_partition(m) -> str:
    """Runs of equal parts collapse to m^d, e.g. (2, 1, 1, 1, 1) -> '21^4'."""
    out = []
    for part, run in groupby(m):
        k = len(list(run))
        out.append(f"{part}^{k}" if k > 1 else str(part))
    return "".join(out)


@dataclass(frozen=True)
class OrderType:
    w: tuple[int, ...]
    m: tuple[int, ...]

    @property
    def rendered(self) -> str:
        return render_partition(self.m)

    @classmethod
    def from_w(cls, w) -> OrderType:
        w = tuple(int(x) for x in w)
        return cls(w, conjugate_partition(w))

    def __str__(self):
        return self.rendered


def order_type(g: PcGroup) -> OrderType:
    logs = [H.log_order for H in agemo_series(g)]
    return OrderType.from_w(a - b for a, b in zip(logs, logs[1:]))


def _logs_of_product(g: PcGroup, A: Subgroup, B: Subgroup) -> int:
    return closure(g, list(A.igs) + list(B.igs)).log_order


@dataclass(frozen=True)
class InvariantProfile:
    order_type: OrderType
    centre_order: int
    derived_order: int
    frattini_quotient_rank: int
    lcs_orders: tuple[int, ...]
    ucs_orders: tuple[int, ...]
    class_size_multiset: dict = field(hash=False)
    exponent: int
    abelian_invariants: tuple[int, ...]
    nilpotency_class: int

    @property
    def class_count(self) -> int:
        return sum(self.class_size_multiset.values())

    def fingerprint(self) -> tuple:
        return (self.order_type.m, self.centre_order, self.derived_order,
                self.frattini_quotient_rank, self.lcs_orders, self.ucs_orders,
                tuple(sorted(self.class_size_multiset.items())), self.exponent,
                self.abelian_invariants, self.nilpotency_class)

    def as_dict(self) -> dict:
        return {
            "order_type": self.order_type.rendered,
            "centre_order": self.centre_order,
            "derived_order": self.derived_order,
            "frattini_quotient_rank": self.frattini_quotient_rank,
            "lcs_orders": list(self.lcs_orders),
            "ucs_orders": list(self.ucs_orders),
            "class_size_multiset": {str(k): v for k, v in self.class_size_multiset.items()},
            "exponent": self.exponent,
            "abelian_invariants": list(self.abelian_invariants),
            "nilpotency_class": self.nilpotency_class,
        }


def profile(g: PcGroup, classes: bool = True) -> InvariantProfile:
    """All invariants; orders other than the exponent are logarithms base p.

    With ``classes=False`` the class-size multiset is left empty.
    """
    agemos = agemo_series(g)
    logs = [H.log_order for H in agemos]
    ot = OrderType.from_w(a - b for a, b in zip(logs, logs[1:]))
    lcs = lower_central_series(g)
    ucs = upper_central_series(g)
    derived = lcs[1] if len(lcs) > 1 else trivial(g)
    # G/G' has |℧^i(G/G')| = |℧^i(G) G'| / |G'|
    ab_logs = [_logs_of_product(g, H, derived) for H in agemos]
    ab_w = [a - b for a, b in zip(ab_logs, ab_logs[1:])]
    ab = conjugate_partition(ab_w)
    frattini = _logs_of_product(g, agemos[1], derived) if len(agemos) > 1 else 0
    return InvariantProfile(
        order_type=ot,
        centre_order=ucs[1].log_order if len(ucs) > 1 else 0,
        derived_order=derived.log_order,
        frattini_quotient_rank=g.n - frattini,
        lcs_orders=tuple(H.log_order for H in lcs),
        ucs_orders=tuple(H.log_order for H in ucs),
        class_size_multiset=conjugacy_classes(g) if classes else {},
        exponent=g.p ** (len(agemos) - 1),
        abelian_invariants=ab,
        nilpotency_class=len(lcs) - 1,
    )
