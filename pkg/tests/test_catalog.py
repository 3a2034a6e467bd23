from __future__ import annotations

import warnings
from collections import Counter

import pytest

from p6groups import catalog as cat
from p6groups.dsl import parse, serialize
from p6groups.errors import InvalidArgument, UncheckedPresentation, UnsupportedPrime
from p6groups.numtheory import PrimeContext, group_count


@pytest.fixture(scope="module")
def specs():
    return cat.load_specs(cat.packaged_data_dir())


def _block_sizes(specs, p):
    items = cat.plan(PrimeContext(p), specs)
    return Counter(specs[it.spec_index].label for it in items)


@pytest.mark.parametrize("p", [7, 11, 13, 17, 19, 23])
def test_plan_size_matches_count_formula(specs, p):
    assert len(cat.plan(PrimeContext(p), specs)) == group_count(p)


def test_every_family_present(specs):
    assert sorted({s.family for s in specs}) == list(range(1, 44))
    items = cat.plan(PrimeContext(7), specs)
    assert [it.index for it in items] == list(range(1, len(items) + 1))
    assert [it.family for it in items] == sorted(it.family for it in items)


def test_abelian_family_has_eleven_partitions(specs):
    items = [it for it in cat.plan(PrimeContext(7), specs) if it.family == 1]
    assert len(items) == 11
    assert all(specs[it.spec_index].rank == 1 for it in items)


@pytest.mark.parametrize("label,p_one,p_other", [
    ("(11,14r)", 2, 2), ("(16,12r)", 3, 1), ("(18,9r)", 2, 2), ("(21,7rs)", 21, 55),
])
def test_block_cardinalities_at_7_and_11(specs, label, p_one, p_other):
    assert _block_sizes(specs, 7)[label] == p_one
    assert _block_sizes(specs, 11)[label] == p_other


def test_block_cardinalities_at_13(specs):
    sizes = _block_sizes(specs, 13)
    assert sizes["(11,14r)"] == 2
    assert sizes["(16,12r)"] == 3
    assert sizes["(18,9r)"] == 4
    assert sizes["(21,7rs)"] == 78


def test_labels_carry_parameters(specs):
    items = cat.plan(PrimeContext(7), specs)
    labels = [it.label for it in items if it.label.startswith("(21,7rs)")]
    assert labels[0] == "(21,7rs) r=0 s=1"
    assert len(set(labels)) == len(labels)


def test_prime_gating():
    with pytest.raises(UnsupportedPrime):
        cat.check_prime(5)
    with pytest.raises(UnsupportedPrime):
        cat.check_prime(3)
    with pytest.raises(InvalidArgument):
        cat.check_prime(9)
    with pytest.warns(UserWarning, match="Φ35"):
        cat.check_prime(5, allow_p5=True)
    assert cat.check_prime(7).p == 7


def test_iter_catalog_selection(specs):
    entries = list(cat.iter_catalog(7, specs, select=[1, 12, 860]))
    assert [e.index for e in entries] == [1, 12, 860]
    assert entries[0].id == (7, 1)
    assert entries[0].profile.nilpotency_class == 1
    assert all(e.group.consistent for e in entries)


def _corrupt(specs, label):
    """Copy of the specs where one block gets an extra relation that breaks consistency."""
    out = []
    for s in specs:
        if s.label == label:
            text = serialize(s).replace("pow a6^p = 1", "pow a6^p = a5")
            assert text != serialize(s)
            (s,) = parse(text)
        out.append(s)
    return out


def test_fault_injection_names_the_label(specs):
    small = [s for s in specs if s.family in (1, 2, 3, 21)]
    bad = _corrupt(small, "(21,1)")
    rep = cat.verify_catalog(7, bad, profiles=False)
    assert not rep.passed
    assert [f.label for f in rep.consistency_failures] == ["(21,1)"]
    assert "(21,1)" in cat.report_text(rep)
    assert "FAIL" in cat.report_text(rep)
    with pytest.raises(UncheckedPresentation, match=r"\(21,1\)"):
        list(cat.iter_catalog(7, bad))
    assert any(e.label == "(21,1)" for e in cat.iter_catalog(7, bad, allow_unverified=True))


def test_report_independent_of_worker_count(specs):
    subset = [s for s in specs if s.family in (5, 14, 16)]
    one = cat.verify_catalog(7, subset, profiles=True, workers=1)
    two = cat.verify_catalog(7, subset, profiles=True, workers=2)
    assert cat.report_machine(one) == cat.report_machine(two)
    assert cat.report_text(one) == cat.report_text(two)
    assert not one.failures() and one.actual_count == 32


def test_load_specs_errors(tmp_path):
    with pytest.raises(cat.DataError):
        cat.load_specs(tmp_path / "missing")
    with pytest.raises(cat.DataError):
        cat.load_specs(tmp_path)
    (tmp_path / "bad.p6").write_text("family 1 rank 1 gens a1..a6\npow a9^p = 1\n")
    with pytest.raises(cat.DataError, match="bad.p6"):
        cat.load_specs(tmp_path)


def test_p5_report_has_no_expected_count(specs):
    small = [s for s in specs if s.family == 1]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = cat.verify_catalog(5, small, allow_p5=True, profiles=False)
    assert rep.expected_count is None and rep.actual_count == 11 and rep.passed
    assert "no count formula" in cat.report_text(rep)


def test_machine_records_are_key_value(specs):
    small = [s for s in specs if s.family in (1, 2)]
    rep = cat.verify_catalog(7, small, profiles=True)
    lines = cat.report_machine(rep).splitlines()
    assert lines[0].startswith("record=summary p=7 expected_count=860 actual_count=")
    assert all(line.startswith("record=") for line in lines)
    entry = next(line for line in lines if line.startswith("record=entry"))
    assert "label=(1,1) " in entry and "order_type=6" in entry


def test_non_central_a1_is_reported():
    # a1 takes part in a nontrivial commutator, so it cannot be central
    (spec,) = parse('family 19 label "(19,x)" rank 6\ngens a1..a6\ncomm [a1,a2] = a5\n')
    rep = cat.verify_catalog(7, [spec], profiles=False)
    assert [f.label for f in rep.centrality_failures] == ["(19,x)"]
    assert "a2" in rep.centrality_failures[0].message
    assert not rep.passed
