"""The ordered catalog of groups of order p^6 and its verification.

Family specs are read from a directory of ``.p6`` files, expanded over
their parameter ranges and compiled one entry at a time.  Entries are
numbered 1, 2, ... in family order, then file order within a family, then
parameter order (first declared parameter outermost).

Verification runs every entry through the consistency check and the
structural checks, optionally computes invariant profiles, and merges the
per-entry results in index order, so the report does not depend on the
number of workers.
"""

from __future__ import annotations

import os
import warnings
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import invariants as inv
from .dsl import FamilySpec, ParamBinding, compile_spec, expand, parse
from .errors import (DslSyntaxError, InvalidArgument, MalformedSpec, P6Error,
                     UncheckedPresentation, UnsupportedPrime)
from .numtheory import PrimeContext, group_count, is_prime
from .pcgroup import DEFAULT_BUDGET, PcGroup, consistency_check

DATA_SUFFIX = ".p6"
P5_UNRELIABLE = tuple(range(35, 40))
P5_WARNING = ("p = 5: presentations in families " + ", ".join(f"Φ{i}" for i in P5_UNRELIABLE)
              + " are not guaranteed to be correct at this prime")


class DataError(P6Error):
    """A data directory that is missing, empty or holds an unparseable file."""


# -- data files ---------------------------------------------------------------

def packaged_data_dir() -> Path:
    return Path(str(resources.files("p6groups") / "data"))


def resolve_data_dir(path: str | os.PathLike | None = None) -> Path:
    """``path`` if given; otherwise ./data when it holds data files, else the packaged copy."""
    if path is not None:
        return Path(path)
    local = Path("data")
    if local.is_dir() and any(local.glob("*" + DATA_SUFFIX)):
        return local
    return packaged_data_dir()


def load_specs(data_dir: str | os.PathLike | None = None) -> list[FamilySpec]:
    """All family specs under ``data_dir``, sorted by family (file order kept within a family)."""
    root = resolve_data_dir(data_dir)
    if not root.is_dir():
        raise DataError(f"data directory {root} does not exist")
    files = sorted(root.glob("*" + DATA_SUFFIX))
    if not files:
        raise DataError(f"no {DATA_SUFFIX} files in {root}")
    specs: list[FamilySpec] = []
    problems: list[str] = []
    for f in files:
        try:
            specs.extend(parse(f.read_text()))
        except DslSyntaxError as e:
            problems += [f"{f}: {d}" for d in e.diagnostics]
    if problems:
        raise DataError("\n".join(problems))
    return sorted(specs, key=lambda s: s.family)


# -- catalog entries -----------------------------------------------------------

def check_prime(p: int, allow_p5: bool = False) -> PrimeContext:
    if not isinstance(p, int) or not is_prime(p):
        raise InvalidArgument(f"{p!r} is not a prime")
    if p < 5:
        raise UnsupportedPrime(f"the catalog needs p >= 5 (got {p})")
    if p == 5:
        if not allow_p5:
            raise UnsupportedPrime("p = 5 needs an explicit override; " + P5_WARNING)
        warnings.warn(P5_WARNING, stacklevel=3)
    return PrimeContext(p)


def resolved_label(spec: FamilySpec, binding: ParamBinding) -> str:
    params = binding.describe()
    return f"{spec.label} {params}" if params else spec.label


@dataclass(frozen=True)
class PlanItem:
    """One catalog position before compilation."""

    index: int
    spec_index: int
    binding: ParamBinding
    family: int
    label: str


def plan(ctx: PrimeContext, specs: Sequence[FamilySpec]) -> list[PlanItem]:
    out = []
    for k, spec in enumerate(specs):
        for binding in expand(spec, ctx):
            out.append(PlanItem(len(out) + 1, k, binding, spec.family, resolved_label(spec, binding)))
    return out


@dataclass
class CatalogEntry:
    id: tuple[int, int]
    family: int
    label: str
    group: PcGroup
    spec: FamilySpec = field(repr=False)
    binding: ParamBinding = field(repr=False)
    _profile: inv.InvariantProfile | None = field(default=None, repr=False)

    @property
    def index(self) -> int:
        return self.id[1]

    @property
    def profile(self) -> inv.InvariantProfile:
        if self._profile is None:
            self._profile = inv.profile(self.group)
        return self._profile


def _compile(ctx: PrimeContext, spec: FamilySpec, item: PlanItem, budget: int) -> PcGroup:
    pres = compile_spec(spec, item.binding, ctx)
    return PcGroup(pres, ctx, budget=budget)


def iter_catalog(p: int, specs: Sequence[FamilySpec], *, allow_p5: bool = False,
                 allow_unverified: bool = False, budget: int = DEFAULT_BUDGET,
                 select: Iterable[int] | None = None) -> Iterator[CatalogEntry]:
    """Compile and check entries one at a time, in catalog order.

    ``select`` restricts to the given 1-based indices.  A failed
    consistency check raises UncheckedPresentation naming the label,
    unless ``allow_unverified`` is set.
    """
    ctx = check_prime(p, allow_p5)
    wanted = None if select is None else set(select)
    for item in plan(ctx, specs):
        if wanted is not None and item.index not in wanted:
            continue
        spec = specs[item.spec_index]
        try:
            g = _compile(ctx, spec, item, budget)
        except MalformedSpec as e:
            raise MalformedSpec(f"{item.label}: {e}") from None
        report = consistency_check(g)
        if not report and not allow_unverified:
            raise UncheckedPresentation(f"{item.label}: {report.describe()}")
        g.allow_unverified = allow_unverified
        yield CatalogEntry((p, item.index), item.family, item.label, g, spec, item.binding)


def build_catalog(p: int, specs: Sequence[FamilySpec], **kw) -> list[CatalogEntry]:
    return list(iter_catalog(p, specs, **kw))


# -- verification -------------------------------------------------------------------

@dataclass(frozen=True)
class Failure:
    index: int
    label: str
    message: str

    def __str__(self):
        return f"#{self.index} {self.label}: {self.message}"


@dataclass(frozen=True)
class EntryResult:
    index: int
    family: int
    label: str
    consistency: str | None = None   # failure message
    centrality: str | None = None
    centre_basis: str | None = None
    profile: inv.InvariantProfile | None = None


@dataclass
class VerificationReport:
    p: int
    expected_count: int | None  # None where the count formula is not asserted (p = 5)
    actual_count: int = 0
    consistent_count: int = 0
    consistency_failures: list[Failure] = field(default_factory=list)
    centrality_failures: list[Failure] = field(default_factory=list)
    centre_basis_failures: list[Failure] = field(default_factory=list)
    family_counts: dict[int, int] = field(default_factory=dict)
    profile_collisions: list[tuple[int, ...]] = field(default_factory=list)
    isoclinism_mismatches: list[int] = field(default_factory=list)
    profiles: dict[int, inv.InvariantProfile] = field(default_factory=dict, repr=False)
    labels: dict[int, str] = field(default_factory=dict, repr=False)

    @property
    def profiled(self) -> bool:
        return bool(self.profiles)

    @property
    def passed(self) -> bool:
        count_ok = self.expected_count is None or self.expected_count == self.actual_count
        return (count_ok and not self.consistency_failures
                and not self.centrality_failures and not self.centre_basis_failures
                and not self.isoclinism_mismatches)

    def failures(self) -> list[Failure]:
        return sorted(self.consistency_failures + self.centrality_failures + self.centre_basis_failures,
                      key=lambda f: f.index)


def check_entry(ctx: PrimeContext, spec: FamilySpec, item: PlanItem, *, profile: bool,
                budget: int = DEFAULT_BUDGET) -> EntryResult:
    """All per-entry checks; failures are returned, not raised."""
    base = dict(index=item.index, family=item.family, label=item.label)
    try:
        g = _compile(ctx, spec, item, budget)
    except MalformedSpec as e:
        return EntryResult(**base, consistency=f"does not compile: {e}")
    report = consistency_check(g)
    if not report:
        return EntryResult(**base, consistency=report.describe())
    if g.n != 6:
        return EntryResult(**base, consistency=f"order p^{g.n}, expected p^6")
    names = g.presentation.names
    centrality = None
    if spec.rank == 6:
        # the relations list every commutator of generators, so a1 is
        # central iff none involving it is nontrivial
        k = names.index("a1") + 1
        bad = [names[(i if j == k else j) - 1] for (j, i), v in g.presentation.comm_rhs.items()
               if k in (j, i) and any(v)]
        if bad:
            centrality = f"a1 does not commute with {', '.join(bad)}"
    basis = None
    prof = None
    if profile:
        if spec.betas:
            Z = inv.center(g)
            B = inv.closure(g, [g.generator(names.index(b) + 1) for b in spec.betas])
            if B != Z:
                basis = (f"b-generators span a subgroup of order p^{B.log_order}, "
                         f"centre has order p^{Z.log_order}")
        prof = inv.profile(g)
    return EntryResult(**base, centrality=centrality, centre_basis=basis, profile=prof)


_worker_state: dict = {}


def _worker_init(p: int, specs: Sequence[FamilySpec], profile: bool, budget: int):
    _worker_state.update(ctx=PrimeContext(p), specs=specs, profile=profile, budget=budget)


def _worker_run(item: PlanItem) -> EntryResult:
    s = _worker_state
    return check_entry(s["ctx"], s["specs"][item.spec_index], item, profile=s["profile"], budget=s["budget"])


def verify_catalog(p: int, specs: Sequence[FamilySpec], *, allow_p5: bool = False,
                   profiles: bool | None = None, workers: int = 1,
                   budget: int = DEFAULT_BUDGET, progress=None) -> VerificationReport:
    """Check every entry and collect the report (failures are data, never raised).

    Profiles (and the centre-basis check that shares their cost) are on by
    default at p = 7 only.  ``progress`` is called with each finished
    EntryResult, in index order.
    """
    ctx = check_prime(p, allow_p5)
    if workers < 1:
        raise InvalidArgument("workers must be at least 1")
    if profiles is None:
        profiles = p == 7
    items = plan(ctx, specs)
    if workers == 1:
        _worker_init(p, specs, profiles, budget)
        results = map(_worker_run, items)
        return _reduce(p, _observe(results, progress))
    chunk = max(1, len(items) // (workers * 8))
    with ProcessPoolExecutor(workers, initializer=_worker_init,
                             initargs=(p, list(specs), profiles, budget)) as pool:
        return _reduce(p, _observe(pool.map(_worker_run, items, chunksize=chunk), progress))


def _observe(results, progress):
    for r in results:
        if progress is not None:
            progress(r)
        yield r


def _reduce(p: int, results: Iterable[EntryResult]) -> VerificationReport:
    rep = VerificationReport(p=p, expected_count=expected_count(p))
    counts: dict[int, int] = defaultdict(int)
    family_of: dict[int, int] = {}
    for r in sorted(results, key=lambda r: r.index):
        family_of[r.index] = r.family
        rep.actual_count += 1
        rep.labels[r.index] = r.label
        counts[r.family] += 1
        if r.consistency:
            rep.consistency_failures.append(Failure(r.index, r.label, r.consistency))
            continue
        rep.consistent_count += 1
        if r.centrality:
            rep.centrality_failures.append(Failure(r.index, r.label, r.centrality))
        if r.centre_basis:
            rep.centre_basis_failures.append(Failure(r.index, r.label, r.centre_basis))
        if r.profile is not None:
            rep.profiles[r.index] = r.profile
    rep.family_counts = {phi: counts.get(phi, 0) for phi in range(1, 44)}
    if rep.profiles:
        rep.profile_collisions = profile_collisions(rep.profiles)
        families = defaultdict(list)
        for r in rep.profiles:
            families[family_of[r]].append(r)
        rep.isoclinism_mismatches = isoclinism_mismatches(
            {phi: [rep.profiles[i] for i in ids] for phi, ids in families.items()})
    return rep


def expected_count(p: int) -> int | None:
    try:
        return group_count(p)
    except UnsupportedPrime:
        return None


def profile_collisions(profiles: dict[int, inv.InvariantProfile]) -> list[tuple[int, ...]]:
    """Index sets (size >= 2) of entries with identical profiles, ordered by first index."""
    groups: dict[tuple, list[int]] = defaultdict(list)
    for i in sorted(profiles):
        groups[profiles[i].fingerprint()].append(i)
    return sorted(tuple(v) for v in groups.values() if len(v) > 1)


def isoclinism_mismatches(by_family: dict[int, list[inv.InvariantProfile]]) -> list[int]:
    """Families whose members disagree on |G/Z| or |G'| (both are isoclinism invariants)."""
    bad = []
    for phi in sorted(by_family):
        keys = {(6 - pr.centre_order, pr.derived_order) for pr in by_family[phi]}
        if len(keys) > 1:
            bad.append(phi)
    return bad


# -- rendering --------------------------------------------------------------------

def report_text(rep: VerificationReport) -> str:
    lines = [
        f"p = {rep.p}",
        (f"expected {rep.expected_count} groups, catalog has {rep.actual_count}"
         if rep.expected_count is not None else
         f"no count formula at p = {rep.p}; catalog has {rep.actual_count}"),
        f"{rep.consistent_count}/{rep.actual_count} consistent",
        "family counts: " + " ".join(f"Φ{phi}={n}" for phi, n in rep.family_counts.items()),
    ]
    for title, items in (("consistency failures", rep.consistency_failures),
                         ("centrality failures (a1 not central)", rep.centrality_failures),
                         ("centre-basis failures", rep.centre_basis_failures)):
        lines.append(f"{title}: {len(items)}")
        lines += [f"  {f}" for f in items]
    if rep.profiled:
        lines.append(f"profiles computed: {len(rep.profiles)}")
        lines.append("isoclinism mismatches: "
                     + (" ".join(f"Φ{phi}" for phi in rep.isoclinism_mismatches) or "none"))
        lines.append(f"profile collisions: {len(rep.profile_collisions)} sets "
                     f"covering {sum(len(c) for c in rep.profile_collisions)} entries")
        for c in rep.profile_collisions:
            lines.append("  " + ", ".join(f"#{i} {rep.labels[i]}" for i in c))
    else:
        lines.append("profiles: not computed")
    lines.append("PASS" if rep.passed else "FAIL")
    return "\n".join(lines) + "\n"


def _kv(**fields) -> str:
    out = []
    for k, v in fields.items():
        if isinstance(v, bool):
            v = "true" if v else "false"
        s = str(v)
        if any(c in s for c in ' "=') or not s:
            s = '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'
        out.append(f"{k}={s}")
    return " ".join(out)


def report_machine(rep: VerificationReport) -> str:
    expected = "none" if rep.expected_count is None else rep.expected_count
    lines = [_kv(record="summary", p=rep.p, expected_count=expected,
                 actual_count=rep.actual_count, consistent_count=rep.consistent_count,
                 consistency_failures=len(rep.consistency_failures),
                 centrality_failures=len(rep.centrality_failures),
                 centre_basis_failures=len(rep.centre_basis_failures),
                 profile_collisions=len(rep.profile_collisions),
                 profiled=rep.profiled, passed=rep.passed)]
    for phi, n in rep.family_counts.items():
        lines.append(_kv(record="family", family=phi, count=n))
    for kind, items in (("consistency", rep.consistency_failures), ("centrality", rep.centrality_failures),
                        ("centre_basis", rep.centre_basis_failures)):
        for f in items:
            lines.append(_kv(record="failure", kind=kind, id=f.index, label=f.label, message=f.message))
    for phi in rep.isoclinism_mismatches:
        lines.append(_kv(record="failure", kind="isoclinism", family=phi))
    for i in sorted(rep.profiles):
        lines.append(_kv(record="entry", id=i, label=rep.labels[i], **profile_fields(rep.profiles[i])))
    for c in rep.profile_collisions:
        lines.append(_kv(record="collision", ids=",".join(map(str, c))))
    return "\n".join(lines) + "\n"


def profile_fields(pr: inv.InvariantProfile) -> dict:
    return {
        "order_type": pr.order_type.rendered,
        "centre_order": pr.centre_order,
        "derived_order": pr.derived_order,
        "frattini_quotient_rank": pr.frattini_quotient_rank,
        "lcs_orders": ",".join(map(str, pr.lcs_orders)),
        "ucs_orders": ",".join(map(str, pr.ucs_orders)),
        "class_sizes": ",".join(f"{k}:{v}" for k, v in sorted(pr.class_size_multiset.items())),
        "class_count": pr.class_count,
        "exponent": pr.exponent,
        "abelian_invariants": ",".join(map(str, pr.abelian_invariants)),
        "nilpotency_class": pr.nilpotency_class,
    }


def profile_line(index: int, label: str, pr: inv.InvariantProfile) -> str:
    """One-line summary: id, label, order type, centre, derived, lcs orders, class count."""
    lcs = ",".join(map(str, pr.lcs_orders))
    return (f"{index} {label} | order type {pr.order_type.rendered} | centre p^{pr.centre_order} "
            f"| derived p^{pr.derived_order} | lcs {lcs} | {pr.class_count} classes")
