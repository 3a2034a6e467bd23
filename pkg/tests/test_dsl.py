from __future__ import annotations

import pytest

from p6groups.catalog import load_specs, packaged_data_dir
from p6groups.dsl import ParamBinding, compile_spec, emit_cas, expand, parse, serialize
from p6groups.errors import DslSyntaxError, InvalidArgument, MalformedSpec
from p6groups.numtheory import PrimeContext
from p6groups.pcgroup import PcGroup

ABELIAN = "family 1 rank 1 gens a1..a6 { }"

HEISENBERG = """
family 2 label "heis" rank 3
gens a1..a3
comm [a2,a3] = a1
"""

SPEC_R = """
family 11 label "(11,1r)" rank 6
gens a1..a6
param r in {1, nu}
pow a6^p = a1^r
comm [a5,a6] = a1
"""

CONDITIONAL = """
family 16 label "(16,1r)" rank 6
gens a1..a6
param r in {1, omega, omega^2} when p mod 3 == 1 else {1}
pow a6^p = a1^r
comm [a5,a6] = a1
"""

WITH_BETA = """
family 4 label "beta" rank 5
gens a1..a6, b1
def a1 = b1^2
comm [a2,a6] = a1
comm [a3,a6] = a2
"""


def test_abelian_spec_has_no_relations():
    (spec,) = parse(ABELIAN)
    assert (spec.family, spec.rank, spec.generators) == (1, 1, tuple(f"a{i}" for i in range(1, 7)))
    assert spec.powers == () and spec.comms == () and spec.defs == ()


def test_two_element_range():
    (spec,) = parse(SPEC_R)
    assert spec.param_names == ("r",)
    ctx = PrimeContext(7)
    assert [b.assignments for b in expand(spec, ctx)] == [{"r": 1}, {"r": 3}]


@pytest.mark.parametrize("p,values", [(7, [1, 3, 2]), (13, [1, 2, 4]), (11, [1]), (17, [1])])
def test_conditional_range(p, values):
    (spec,) = parse(CONDITIONAL)
    bindings = expand(spec, PrimeContext(p))
    assert [b.assignments["r"] for b in bindings] == values
    assert expand(spec, PrimeContext(p)) == bindings


def test_provenance_records_branch():
    (spec,) = parse(CONDITIONAL)
    (b, *_) = expand(spec, PrimeContext(7))
    assert any("p mod 3 == 1" in s for s in b.provenance)
    assert b.describe() == "r=1"


def test_compile_substitutes_parameters():
    (spec,) = parse(SPEC_R)
    ctx = PrimeContext(7)
    pres = compile_spec(spec, ParamBinding({"r": 3}), ctx)
    assert pres.power_rhs[5] == (3, 0, 0, 0, 0, 0)
    assert PcGroup.from_presentation(pres, ctx).consistent


def test_omega_squared_at_p7():
    src = CONDITIONAL.replace("a1^r", "a1^(omega^2)").replace("param r in {1, omega, omega^2} when p mod 3 == 1 else {1}\n", "")
    (spec,) = parse(src)
    pres = compile_spec(spec, None, PrimeContext(7))
    assert pres.power_rhs[5][0] == 2


def test_rank6_compile_is_direct():
    (spec,) = parse(HEISENBERG.replace("a1..a3", "a1..a6"))
    pres = compile_spec(spec, None, PrimeContext(7))
    # [a2, a3] = a1 is stored as [a3, a2] = a1^-1
    assert pres.comm_rhs == {(3, 2): (6, 0, 0, 0, 0, 0)}


def test_beta_elimination():
    (spec,) = parse(WITH_BETA)
    pres = compile_spec(spec, None, PrimeContext(7))
    assert pres.n == 6
    assert pres.names[0] == "b1"
    g = PcGroup.from_presentation(pres)
    assert g.order == 7 ** 6


def test_unbound_parameter_rejected():
    (spec,) = parse(SPEC_R)
    with pytest.raises(MalformedSpec):
        compile_spec(spec, ParamBinding({"r": 2}), PrimeContext(7))
    with pytest.raises(MalformedSpec):
        compile_spec(spec, ParamBinding(), PrimeContext(7))


def test_wrong_generator_count_rejected():
    (spec,) = parse(HEISENBERG)
    with pytest.raises(MalformedSpec):
        compile_spec(spec, None, PrimeContext(7))
    assert compile_spec(spec, None, PrimeContext(7), generators=3).n == 3


def test_definition_cycle_rejected():
    src = WITH_BETA.replace("def a1 = b1^2", "def a1 = a2\ndef a2 = a1")
    with pytest.raises((MalformedSpec, DslSyntaxError)):
        (spec,) = parse(src)
        compile_spec(spec, None, PrimeContext(7))


@pytest.mark.parametrize("src,fragment", [
    ("family 1 rank 1 gens a1..a6\ncomm [a2,a2] = a1\n", "equal"),
    ("family 1 rank 1 gens a1..a6\ncomm [a1,a2] = a1\ncomm [a1,a2] = a1\n", "duplicate"),
    ("family 1 rank 1 gens a1..a6\npow a7^p = a1\n", "a7"),
    ("family 1 rank 1 gens a1..a6\npow a2^p = a1^q\n", "q"),
])
def test_semantic_errors(src, fragment):
    with pytest.raises(DslSyntaxError) as err:
        parse(src)
    assert fragment in str(err.value)
    d = err.value.diagnostics[0]
    assert d.line >= 1 and d.col >= 1


def test_diagnostics_collected_and_capped():
    bad = "family 1 rank 1 gens a1..a6\n" + "pow a9^p = a1\n" * 30
    with pytest.raises(DslSyntaxError) as err:
        parse(bad)
    diags = err.value.diagnostics
    assert 1 < len(diags) <= 20
    assert [d.line for d in diags] == sorted(d.line for d in diags)
    assert diags[0].line == 2


def test_lexical_error_reports_position():
    with pytest.raises(DslSyntaxError) as err:
        parse("family 1 rank 1 gens a1..a6\npow a2^p = a1 $\n")
    assert err.value.diagnostics[0].line == 2


@pytest.mark.parametrize("src", [ABELIAN, HEISENBERG, SPEC_R, CONDITIONAL, WITH_BETA])
def test_round_trip(src):
    specs = parse(src)
    text = serialize(specs[0])
    assert parse(text) == specs
    assert serialize(specs[0]) == text


def test_abelian_canonical_text():
    (spec,) = parse(ABELIAN)
    assert serialize(spec) == "convention bracket=left-normed order=ij\n\nfamily 1 rank 1\ngens a1..a6\n"
    assert parse(serialize(spec)) == [spec]


def test_round_trip_of_shipped_data():
    specs = load_specs(packaged_data_dir())
    assert len(specs) > 100
    for spec in specs:
        assert parse(serialize(spec)) == [spec], spec.label


def test_emit_gap_style_abelian():
    (spec,) = parse(ABELIAN)
    script = emit_cas(spec, "gap-style", None, PrimeContext(7), label="(1,11)")
    assert script == emit_cas(spec, "gap-style", None, PrimeContext(7), label="(1,11)")
    assert "(1,11)" in script and "p = 7" in script
    assert script.count("^7") == 6
    assert "Comm(" not in script


def test_emit_magma_style_heisenberg():
    (spec,) = parse(HEISENBERG)
    pres = compile_spec(spec, None, PrimeContext(5), generators=3)
    script = emit_cas(pres, "magma-style", label="heis")
    assert "(a3,a2)" in script
    assert script == emit_cas(pres, "magma-style", label="heis")


def test_emit_rejects_unknown_dialect():
    (spec,) = parse(ABELIAN)
    with pytest.raises(InvalidArgument):
        emit_cas(spec, "maple", None, PrimeContext(7))
