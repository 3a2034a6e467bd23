from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from naive_groups import FiniteGroup, random_consistent_cases
from p6groups import invariants as inv
from p6groups.pcgroup import PcGroup, PcPresentation

ORACLE_CASES = 24
CASES = random_consistent_cases(ORACLE_CASES)


@pytest.fixture(scope="module", params=range(ORACLE_CASES), ids=lambda k: f"case{k}")
def case(request):
    pres, model = CASES[request.param]
    oracle = FiniteGroup(model.table(), pres.p, model.right[:, 0])
    return PcGroup.from_presentation(pres), oracle


def _set(H: inv.Subgroup) -> frozenset[int]:
    return frozenset(H.codes().tolist())


def test_random_cases_are_varied():
    shapes = Counter((pres.p, pres.n) for pres, _ in CASES)
    assert len(shapes) == 6
    nonabelian = sum(bool(pres.comm_rhs) for pres, _ in CASES)
    assert nonabelian >= ORACLE_CASES // 2


def test_multiplication_table(case):
    g, o = case
    N = o.N
    a, b = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    assert np.array_equal(g.mul_codes(a.ravel(), b.ravel()).reshape(N, N), o.T)
    assert np.array_equal(g.inv_codes(np.arange(N)), o.inv)


def test_centre(case):
    g, o = case
    assert _set(inv.center(g)) == o.centre()


def test_derived_subgroup(case):
    g, o = case
    assert _set(inv.derived_subgroup(g)) == o.derived()


def test_lower_central_series(case):
    g, o = case
    assert [_set(H) for H in inv.lower_central_series(g)] == o.lower_central_series()


def test_upper_central_series(case):
    g, o = case
    assert [_set(H) for H in inv.upper_central_series(g)] == o.upper_central_series()


def test_conjugacy_classes(case):
    g, o = case
    expected = Counter(len(c) for c in o.classes())
    assert inv.conjugacy_classes(g) == dict(sorted(expected.items()))


def test_agemo_series(case):
    g, o = case
    ours = [_set(H) for H in inv.agemo_series(g)]
    for i, H in enumerate(ours):
        assert H == o.agemo(i)
    assert len(ours[-1]) == 1 and len(ours[-2]) > 1


def test_profile_consistent_with_oracle(case):
    g, o = case
    pr = inv.profile(g)
    p = g.p
    assert p ** pr.centre_order == len(o.centre())
    assert p ** pr.derived_order == len(o.derived())
    assert pr.nilpotency_class == len(o.lower_central_series()) - 1
    orders = [1]
    x = np.arange(o.N)
    while x.any():
        x = o.power(x, p)
        orders.append(orders[-1] * p)
    assert pr.exponent == orders[-1]
    assert sum(pr.order_type.m) == sum(pr.order_type.w) == g.n
    assert pr.class_count == len(o.classes())


def test_subgroup_membership_and_equality(case):
    g, o = case
    Z = inv.center(g)
    for c in range(o.N):
        assert (tuple(int(v) for v in g.from_codes(c)) in Z) == (c in o.centre())
    assert Z == inv.closure(g, list(reversed(Z.igs)))
    assert inv.trivial(g) <= Z <= inv.whole_group(g)


@pytest.mark.parametrize("w,m,text", [
    ((6,), (1, 1, 1, 1, 1, 1), "1^6"),
    ((1, 1, 1, 1, 1, 1), (6,), "6"),
    ((3, 2, 1), (3, 2, 1), "321"),
    ((5, 1), (2, 1, 1, 1, 1), "21^4"),
    ((4, 2), (2, 2, 1, 1), "2^21^2"),
])
def test_order_type_rendering(w, m, text):
    ot = inv.OrderType.from_w(w)
    assert ot.m == m and ot.rendered == text
    assert inv.conjugate_partition(m) == w


def test_order_type_of_cyclic_and_elementary_groups():
    p = 7
    cyclic = PcPresentation(6, p, tuple(tuple(int(k == i - 1) for k in range(6)) for i in range(6)))
    assert inv.order_type(PcGroup.from_presentation(cyclic)).rendered == "6"
    elem = PcGroup.from_presentation(PcPresentation.elementary_abelian(6, p))
    pr = inv.profile(elem)
    assert pr.order_type.rendered == "1^6"
    assert pr.class_size_multiset == {1: p ** 6}
    assert pr.abelian_invariants == (1, 1, 1, 1, 1, 1)


def test_class_equation_and_centre_at_p7():
    # a rank-6 group of class 3: [a6,a5] = a3, [a6,a3] = a1, [a5,a4] = a2
    p = 7
    z = (0,) * 6
    pres = PcPresentation(6, p, (z,) * 6, {(6, 5): (0, 0, 1, 0, 0, 0), (6, 3): (1, 0, 0, 0, 0, 0),
                                             (5, 4): (0, 1, 0, 0, 0, 0)})
    g = PcGroup.from_presentation(pres)
    pr = inv.profile(g)
    sizes = pr.class_size_multiset
    assert sum(k * v for k, v in sizes.items()) == p ** 6
    assert sizes[1] == p ** pr.centre_order
    assert pr.nilpotency_class == 3
    assert pr.lcs_orders == (6, 3, 1, 0)


def test_heisenberg_profile_at_p5():
    pres = PcPresentation(3, 5, ((0, 0, 0),) * 3, {(3, 2): (1, 0, 0)})
    g = PcGroup.from_presentation(pres)
    pr = inv.profile(g)
    assert inv.conjugacy_classes(g) == {1: 5, 5: 24}
    assert (pr.centre_order, pr.derived_order, pr.nilpotency_class, pr.class_count) == (1, 1, 2, 29)
    assert _set(inv.closure(g, [(1, 0, 0)])) == _set(inv.center(g))
    assert inv.center(g).order == 5


def test_order_type_of_homocyclic_pair():
    # Z_{p^3} x Z_{p^3}: a3^p = a2, a2^p = a1 and a6^p = a5, a5^p = a4
    e = lambda k: tuple(int(i == k) for i in range(6))
    z = (0,) * 6
    pres = PcPresentation(6, 7, (z, e(0), e(1), z, e(3), e(4)))
    ot = inv.order_type(PcGroup.from_presentation(pres))
    assert ot.w == (2, 2, 2) and ot.rendered == "3^2"
