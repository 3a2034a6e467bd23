"""Generate the shipped ``.p6`` family files from the GAP SmallGroups data.

Development tool only; the package never imports it.  It reads the order
p^6 section of the library (``sml1.z``), turns every family member into a
DSL block, writes one file per family and then cross-checks the result:

* for each test prime, every DSL expansion compiles to exactly the
  presentation the library decoder produces, in the same order;
* every compiled group is consistent and of order p^6;
* for families 2..10, the b-generators generate the centre, and the
  declared rank equals log_p |G/Z| + log_p |G' n Z|;
* at p = 7 the nilpotency class respects the library's class bound.

Usage::

    python tools/transcribe_smallgroups.py --gap /path/to/smallgrp [--out DIR]
"""

from __future__ import annotations

import argparse
import itertools
import sys
from dataclasses import dataclass, field
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import smallgroups_p6 as sg  # noqa: E402

from p6groups import invariants as I  # noqa: E402
from p6groups.dsl import compile_spec, expand, parse, serialize  # noqa: E402
from p6groups.dsl.assemble import assemble, series_order  # noqa: E402
from p6groups.numtheory import PrimeContext  # noqa: E402
from p6groups.pcgroup import PcGroup, consistency_check  # noqa: E402

PAIRS = [(i, j) for j in range(2, 7) for i in range(1, j)]
CONDITION_TEXT = {
    1: "p mod 3 == 1", 2: "p mod 4 == 1", 3: "p mod 4 == 3", 4: "p mod 5 == 1",
    5: "p == 5", 6: "p != 5", 7: "p != 5 and p mod 4 == 1", 8: "p != 5 and p mod 3 == 2",
}
CONSTANTS = {0: "-1", 1: "1", 2: "2", 25: "nu", 26: "nu^-1", 27: "-nu", 28: "-nu^-1", 29: "2*nu"}
PARAM_NAMES = "rstu"
# families whose unbound power relations need the completion "highest unbound power = a1"
COMPLETED = {8, 25, 26, 34, 42, 43}
RANKS = {1: 1, 2: 3, 3: 4, **{phi: 5 for phi in range(4, 11)}, **{phi: 6 for phi in range(11, 44)}}
CHECK_PRIMES = (5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43)

HEADER = """\
# Groups of order p^6, family {phi}.
# Generated by tools/transcribe_smallgroups.py from the GAP SmallGroups
# library (sml1.z); edit the generator rather than this file.
"""

# -- exponent codes -------------------------------------------------------

COUNT_TEXT = {
    6: "p", 7: "p - 1", 8: "p - 2", 9: "p - 3", 10: "(p - 1 when p mod 4 == 1 else p - 2)",
    11: "(p - 1)/2", 12: "(p - 3)/2", 13: "2*p - 2", 14: "2*p - 4", 15: "p*(p - 1)/2",
    16: "(p - 1)*(p - 1)/2", 19: "(p - 2)*(p - 1)/2", 20: "(p - 2)*(p - 1)/2 - 1",
    21: "(p - 2)*(p - 1)/2 + 1",
}

INDEX_CODES = {3, 4, 5, 6, 7, 8, 9, 30, 31, 32, 33, 34, 35, 36, 37, 38, 47}


def index_symbolic(code: int) -> str:
    """Value of an index code as an expression in the member index i."""
    return {
        3: "i - 2", 4: "i - 1", 5: "i", 6: "i + 1", 7: "i + 2", 8: "1 - i",
        9: "(0 when i == 1 else -i)", 30: "(1 when i mod 2 == 1 else nu)",
        31: "(1 when i <= 2 else nu)", 32: "(-1 when i == 1 else -nu^-1)",
        33: "nu*i", 34: "nu^-1*i", 35: "omega^i", 36: "2*omega^i", 37: "-omega^i",
        38: "omega^(2*i - 1) - 1", 47: "-((i - 2)*27 mod 5)",
    }[code]


def index_concrete(code: int, i: int) -> str:
    """Value of an index code at a fixed member index, as short source text."""
    def times(k, x):
        return x if k == 1 else f"{k}*{x}"

    def opow(k):
        return "omega" if k == 1 else f"omega^{k}"
    if code in (3, 4, 5, 6, 7):
        return str(i + code - 5)
    return {
        8: lambda: str(1 - i), 9: lambda: "0" if i == 1 else str(-i),
        30: lambda: "1" if i % 2 else "nu", 31: lambda: "1" if i <= 2 else "nu",
        32: lambda: "-1" if i == 1 else "-nu^-1", 33: lambda: times(i, "nu"),
        34: lambda: times(i, "nu^-1"), 35: lambda: opow(i), 36: lambda: f"2*{opow(i)}",
        37: lambda: f"-{opow(i)}", 38: lambda: f"{opow(2 * i - 1)} - 1",
        47: lambda: str(-((i - 2) * 27 % 5)),
    }[code]()


EP = "let (ex, ey) = first{(x, y) : x in 1..p, y in 1..p - 1, (x*x - nu^-1*y*y) mod p == nu^-1}"
RS_PAIRS = ["x in {1, nu}", "y in 1..p - 1"]


def rsk(kind: int) -> list[str]:
    disc = "(d != 0 and square(d))" if kind == 11 else "not square(d)"
    return RS_PAIRS + [
        "k in {omega^e : e in 0..(p - 1)/2}", "k != x*y mod p", "let d = ((1 - k)*(1 - k) + 4*x*y) mod p",
        disc, "not (x == nu and (k == 1 or k == p - 1) and square(-y))",
    ]


# list codes: clauses of the comprehension and the value of each code it feeds
LIST_CODES: dict[int, tuple[list[str], dict[int, str]]] = {
    10: (RS_PAIRS + ["square(1 + 4*x*y)", "(1 + 4*x*y) mod p != 0"], {10: "x", 22: "y"}),
    11: (rsk(11), {11: "x", 22: "y", 23: "k"}),
    12: (RS_PAIRS + ["not square(1 + 4*x*y)"], {12: "x", 22: "y"}),
    13: (rsk(13), {13: "x", 22: "y", 23: "k"}),
    14: (["x in {1, nu}", "y in 0..p - 1", "(1 + 4*x*y) mod p == 0"], {14: "x", 22: "y"}),
    15: (["x in {1, nu}", "k in {omega^e : e in 1..(p - 3)/2}", "y in 0..p - 1",
          "(4*x*y + (1 - k)*(1 - k)) mod p == 0"], {15: "x", 22: "y", 23: "k"}),
    16: (["x in 1..p - 1", "z in 0..(p - 1)/2", "z != x", "2*x mod p != z"], {16: "x", 22: "z - x"}),
    17: (["x in {1, nu}", "k in {omega^e : e in 0..(p - 3)/2}",
          "not (p mod 4 == 3 and x == nu and k == 1)"], {17: "x", 22: "k*x^-1", 23: "k"}),
    18: (["x in 1..p - 1", "x*x mod p != p - nu"], {18: "nu^-1*x", 22: "x"}),
    19: (["x in (1..p - 1 when p mod 4 == 1 else 1..(p - 1)/2)",
          "z in (1..(p - 1)/2 when p mod 4 == 1 else 1..p - 1)", "(x*x - nu^-1*z*z) mod p != 1"],
         {19: "nu^-1*z", 22: "x - 1", 23: "x + 1", 24: "z"}),
    20: ([EP, "c in ({l : l in 1..p - 1, l*l mod p != p - 1} when p mod 4 == 1 else 1..(p - 1)/2)"],
         {20: "nu^-1*(c - ey)", 22: "-ex", 23: "ex", 24: "c + ey"}),
    21: ([EP, "x in (1..(p - 1)/2 when p mod 4 == 1 else 1..p - 1)",
          "z in (1..p - 1 when p mod 4 == 1 else 1..(p - 1)/2)", "(x*x - nu^-1*z*z) mod p != nu^-1"],
         {21: "nu^-1*(z - ey)", 22: "x - ex", 23: "x + ex", 24: "z + ey"}),
    40: (["x in {1, nu}", "y in 0..p - 1", "y != x^-1"], {40: "x", 22: "y"}),
    41: (RS_PAIRS, {41: "x", 22: "y"}),
    42: (["x in {1, nu}", "y in 2..p - 1"], {42: "x", 22: "y"}),
    43: (["x in {1, nu}", "y in 1..(p - 1)/2"], {43: "x", 22: "y"}),
    44: (["x in 0..p - 1", "y in 1..(p - 1)/2"], {44: "x", 22: "y"}),
    45: ([EP], {45: "-nu^-1*ey", 22: "-ex", 23: "ex", 24: "ey"}),
}

# codes computed from the member index through a search
INDEXED_SEARCH: dict[int, tuple[str, dict[int, str]]] = {
    39: ("let (x, y) = first{(u, v) : u in 1..p, v in 1..p - 1, (u*u - nu^-1*v*v) mod p == i + 1}",
         {39: "1 - x", 22: "-nu^-1*y", 23: "y", 24: "1 + x"}),
    46: (EP, {46: "-nu^-1*ey", 22: "i - ex", 23: "i + ex", 24: "ey"}),
    48: ("let (x, y) = first{(u, v) : u in 0..p - 1, v in 0..p - 1, (u*u - v*v) mod p == i}",
         {48: "-x - 1", 22: "1 - y"}),
    49: ("let (x, y) = first{(u, v) : u in 0..p - 1, v in 0..p - 1, (u*u - nu^-1*v*v) mod p == i}",
         {49: "-x - 1", 22: "1 - y"}),
}
COMPONENTS = {22, 23, 24}


# -- blocks -----------------------------------------------------------------

@dataclass
class Listing:
    """Values of a block's parameter tuple contributed by one member."""

    elems: list[tuple[str, ...]] | None = None  # explicit tuples
    clauses: list[str] = field(default_factory=list)
    elem: tuple[str, ...] = ()

    def text(self) -> str:
        if self.elems is not None:
            return "{" + ", ".join(_tuple_text(t) for t in self.elems) + "}"
        return "{" + _tuple_text(self.elem) + " : " + ", ".join(self.clauses) + "}"


def _tuple_text(t) -> str:
    return t[0] if len(t) == 1 else "(" + ", ".join(t) + ")"


@dataclass
class Block:
    phi: int
    row: sg.Row
    members: list[tuple[int, sg.Member]]  # (member index, member)
    number: int = 0


def shape(m: sg.Member):
    return tuple((ind, tuple(g for g, _ in w)) for ind, w in m.rels)


def blocks_of(phi: int, rows: list[sg.Row]) -> list[Block]:
    out: list[Block] = []
    for row in rows:
        for k, m in enumerate(row.members):
            last = out[-1] if out and out[-1].row is row else None
            if last is not None and m.c1 != 0 and shape(m) == shape(last.members[0][1]):
                last.members.append((k, m))
            else:
                out.append(Block(phi, row, [(k, m)]))
    for n, b in enumerate(out, 1):
        # the published numbering of family 11 skips two rows before its twelfth block
        b.number = n + 2 if phi == 11 and n >= 12 else n
    return out


def slots(m: sg.Member):
    return [((ind, pos), code) for ind, w in m.rels for pos, (_, code) in enumerate(w)]


def member_listing(m: sg.Member, groups: list[list[tuple]]) -> Listing:
    codes = dict(slots(m))
    group_codes = [codes[g[0]] for g in groups]
    used = set(group_codes)
    lists = [c for c in used if c in LIST_CODES]
    searches = [c for c in used if c in INDEXED_SEARCH]
    index = [c for c in used if c in INDEX_CODES]
    assert len(lists) + len(searches) <= 1, (m, used)
    assert not (lists and index), (m, used)
    if lists:
        clauses, values = LIST_CODES[lists[0]]
        values = {**{c: CONSTANTS[c] for c in CONSTANTS}, **values}
        return Listing(clauses=list(clauses), elem=tuple(values[c] for c in group_codes))
    if not searches and m.c2 <= 5:
        elems = []
        for i in range(1, m.c2 + 1):
            elems.append(tuple(CONSTANTS[c] if c in CONSTANTS else index_concrete(c, i)
                               for c in group_codes))
        return Listing(elems=elems)
    clauses = [f"i in 1..{m.c2 if m.c2 <= 5 else COUNT_TEXT[m.c2]}"]
    values = {c: CONSTANTS[c] for c in CONSTANTS}
    values.update({c: index_symbolic(c) for c in index})
    if searches:
        let, sv = INDEXED_SEARCH[searches[0]]
        clauses.append(let)
        values.update(sv)
    return Listing(clauses=clauses, elem=tuple(values[c] for c in group_codes))


def _concat(listings: list[Listing]) -> str:
    if not listings:
        return "{}"
    if all(l.elems is not None for l in listings):
        return Listing(elems=[t for l in listings for t in l.elems]).text()
    return " ++ ".join(l.text() for l in listings)


def param_values(parts: list[tuple[int, Listing]]) -> tuple[str, str | None]:
    """(value expression, block condition) for the members of one block."""
    conds = {c for c, _ in parts}
    if len(conds) == 1 and 0 not in conds:
        return _concat([l for _, l in parts]), CONDITION_TEXT[conds.pop()]
    if conds <= {0, 2, 3}:
        if conds <= {0}:
            return _concat([l for _, l in parts]), None
        then = _concat([l for c, l in parts if c in (0, 2)])
        other = _concat([l for c, l in parts if c in (0, 3)])
        return f"{then} when p mod 4 == 1 else {other}", None
    if len(conds - {0}) == 1:
        c = (conds - {0}).pop()
        then = _concat([l for _, l in parts])
        other = _concat([l for c0, l in parts if c0 == 0])
        return f"{then} when {CONDITION_TEXT[c]} else {other}", None
    pieces = [l.text() if c == 0 else f"({l.text()} when {CONDITION_TEXT[c]} else {{}})" for c, l in parts]
    return " ++ ".join(pieces), None


def _product_split(elems: list[tuple[str, ...]]):
    """Per-component value lists when ``elems`` is their Cartesian product."""
    axes = [list(dict.fromkeys(t[k] for t in elems)) for k in range(len(elems[0]))]
    if list(itertools.product(*axes)) == elems:
        return axes
    return None


def _simple_product(l: Listing):
    """Sources of a comprehension that is a plain product of single-variable loops."""
    if l.elems is not None:
        return None
    srcs, names = [], []
    for c in l.clauses:
        head, sep, src = c.partition(" in ")
        if not sep or not head.isidentifier() or head in ("let", "not"):
            return None
        if any(_mentions(src, n) for n in names):
            return None
        names.append(head)
        srcs.append(src)
    return srcs if tuple(names) == l.elem else None


def _mentions(text: str, name: str) -> bool:
    import re
    return re.search(rf"\b{name}\b", text) is not None


def block_text(b: Block) -> str:
    row = b.row
    head = b.members[0][1]
    members = [m for _, m in b.members]
    all_slots = [s for s, _ in slots(head)]
    varying = [s for s in all_slots
               if len({dict(slots(m))[s] for m in members}) > 1 or dict(slots(head))[s] not in CONSTANTS]
    groups: list[list[tuple]] = []
    for s in varying:
        for g in groups:
            if all(dict(slots(m))[s] == dict(slots(m))[g[0]] for m in members):
                g.append(s)
                break
        else:
            groups.append([s])
    assert len(groups) <= len(PARAM_NAMES), (b.phi, b.number, groups)

    parts = [(m.c1, member_listing(m, groups)) for m in members]
    exponent: dict[tuple, str] = {}
    params: list[tuple[str, str]] = []
    condition = None
    if groups:
        values, condition = param_values(parts)
        single = len(parts) == 1 and parts[0][1]
        if single and single.elems is not None and len(single.elems) == 1:
            # one value: inline it
            for g, v in zip(groups, single.elems[0]):
                for s in g:
                    exponent[s] = v
        else:
            names = PARAM_NAMES[:len(groups)]
            for g, n in zip(groups, names):
                for s in g:
                    exponent[s] = n
            axes = None
            if single and len(groups) > 1:
                if single.elems is not None:
                    axes = _product_split(single.elems)
                    axes = axes and ["{" + ", ".join(a) + "}" for a in axes]
                else:
                    axes = _simple_product(single)
            if axes:
                params = list(zip(names, axes))
            else:
                params = [(_tuple_text(tuple(names)), values)]
    else:
        condition = CONDITION_TEXT.get(head.c1)
    for s in all_slots:
        exponent.setdefault(s, CONSTANTS.get(dict(slots(head))[s], "?"))

    ren = renaming(row)
    words: dict[int, list[str]] = {}
    for ind, w in head.rels:
        words.setdefault(ind, [])
        for pos, (g, _) in enumerate(w):
            words[ind].append(_letter(ren[g], exponent[(ind, pos)]))
    for ind, w in row.base:
        for g, c in w:
            assert c in CONSTANTS, (b.phi, c)
            words.setdefault(ind, []).append(_letter(ren[g], CONSTANTS[c]))

    letters = PARAM_NAMES[:len(groups)] if params else ""
    label = f"({b.phi},{b.number}{letters})"
    lines = [f'family {b.phi} label "{label}" rank {RANKS[b.phi]}', "gens a1..a6"]
    for n, v in params:
        lines.append(f"param {n} in {v}")
    if condition:
        lines.append(f"when {condition}")
    pw = {ren[i]: words.get(i, []) for i in range(1, 7)}
    for u in completion(b):
        pw[ren[u]] = [f"a{ren[1]}"]
    for i in range(1, 7):
        lines.append(f"pow a{i}^p = {' * '.join(pw[i]) or '1'}")
    for idx, (i, j) in enumerate(PAIRS, 7):
        if words.get(idx):
            lines.append(f"comm [a{ren[i]},a{ren[j]}] = {' * '.join(words[idx])}")
    return "\n".join(lines) + "\n"


def _letter(g: int, e: str) -> str:
    if e == "1":
        return f"a{g}"
    if e.lstrip("-").isidentifier() or e.lstrip("-").isdigit():
        return f"a{g}^{e}"
    return f"a{g}^({e})"


_completion_cache: dict[int, list[int]] = {}
_renaming_cache: dict[int, dict[int, int]] = {}


def renaming(row: sg.Row) -> dict[int, int]:
    """Library generator number -> data generator number.

    The identity unless the library's q1 is not the bottom of the series
    (only family 19); then generators are renumbered along the series order
    of the row's relation structure, so a1 is central in the data files.
    """
    key = id(row)
    if key not in _renaming_cache:
        names = [f"a{i}" for i in range(1, 7)]
        powers: dict[str, list] = {}
        comms: dict[tuple[str, str], list] = {}
        for ind, w in list(row.base) + [r for m in row.members for r in m.rels]:
            word = [(f"a{g}", 1) for g, _ in w]
            if ind <= 6:
                powers.setdefault(f"a{ind}", []).extend(word)
            else:
                i, j = PAIRS[ind - 7]
                comms.setdefault((f"a{i}", f"a{j}"), []).extend(word)
        order = series_order(names, powers, comms)
        ident = {i: i for i in range(1, 7)}
        _renaming_cache[key] = ident if order[0] == "a1" else {
            int(x[1:]): k for k, x in enumerate(order, 1)}
    return _renaming_cache[key]


def completion(b: Block) -> list[int]:
    """Unbound power relations set to a1 (empty when trivial ones are consistent)."""
    key = id(b.row)
    if key not in _completion_cache:
        unbound = [u for u in b.row.unbound if 2 <= u <= 6]
        out: list[int] = []
        if b.phi in COMPLETED and unbound:
            rels = next(r for _, k, _, r in sg.family_groups([b.row], 7))
            if not consistency_check(_port_group(7, rels)):
                out = [max(unbound)]
        _completion_cache[key] = out
    return _completion_cache[key]


def _port_presentation(p: int, rels: dict, extra_powers=(), ren=None):
    ren = ren or {i: i for i in range(1, 7)}
    a = {i: f"a{ren[i]}" for i in range(1, 7)}
    names = [f"a{i}" for i in range(1, 7)]
    powers = {a[i]: [(a[g], e) for g, e in rels.get(i, [])] for i in range(1, 7)}
    for u in extra_powers:
        powers[a[u]] = [(a[1], 1)]
    comms = {(a[i], a[j]): [(a[g], e) for g, e in rels[idx]]
             for idx, (i, j) in enumerate(PAIRS, 7) if rels.get(idx)}
    return assemble(p, names, powers, comms)


def _port_group(p: int, rels: dict) -> PcGroup:
    return PcGroup(_port_presentation(p, rels), allow_unverified=True)


# -- abelian family -------------------------------------------------------------

def partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def abelian_blocks() -> list[str]:
    out = []
    for n, parts in enumerate(partitions(6), 1):
        lines = [f'family 1 label "(1,{n})" rank {RANKS[1]}', "gens a1..a6"]
        # each cyclic factor of order p^k is a chain g1 <- g2 <- ... <- gk of p-th powers
        nxt, pw = 1, {}
        for k in parts:
            chain = list(range(nxt, nxt + k))
            nxt += k
            for lo, hi in zip(chain, chain[1:]):
                pw[hi] = f"a{lo}"
        for i in range(1, 7):
            lines.append(f"pow a{i}^p = {pw.get(i, '1')}")
        out.append("\n".join(lines) + "\n")
    return out


# -- centre generators for families 2..10 --------------------------------------------

def choose_betas(specs, primes=(7,)) -> list[int] | None:
    """Smallest set of a-indices whose images generate the centre for every member."""
    cands = [c for size in range(1, 7) for c in itertools.combinations(range(1, 7), size)]
    for p in primes:
        ctx = PrimeContext(p)
        for spec in specs:
            for binding in expand(spec, ctx):
                g = PcGroup.from_presentation(compile_spec(spec, binding, ctx))
                Z = I.center(g)
                cands = [c for c in cands if _generates(g, Z, c)]
    return list(cands[0]) if cands else None


def _generates(g: PcGroup, Z, cand) -> bool:
    names = g.presentation.names
    seeds = [g.generator(names.index(f"a{i}") + 1) for i in cand]
    if not all(x in Z for x in seeds):
        return False
    return I.closure(g, seeds).log_order == Z.log_order


def with_betas(text: str, betas: list[int]) -> str:
    lines = text.rstrip("\n").split("\n")
    lines[1] = "gens a1..a6, " + (f"b1..b{len(betas)}" if len(betas) > 1 else "b1")
    lines += [f"def a{i} = b{k}" for k, i in enumerate(betas, 1)]
    return "\n".join(lines) + "\n"


# -- cross-checks ---------------------------------------------------------------------

def raw(spec):
    """The family block with its b-generators folded back into a-generators."""
    from dataclasses import replace
    gens = tuple(g for g in spec.generators if g.startswith("a"))
    return replace(spec, generators=gens, defs=())


def cross_check(lib, specs_by_phi, primes) -> list[str]:
    problems = []
    for p in primes:
        ctx = PrimeContext(p)
        for phi in range(2, 44):
            ours = []
            for spec in specs_by_phi[phi]:
                r = raw(spec)
                for binding in expand(spec, ctx):
                    ours.append((spec.label, binding, compile_spec(r, binding, ctx)))
            theirs = []
            for j, k, ii, rels in sg.family_groups(lib[phi], p):
                row = lib[phi][j]
                extra = []
                blocks = [b for b in blocks_of(phi, lib[phi]) if b.row is row]
                extra = completion(blocks[0])
                theirs.append(_port_presentation(p, rels, extra, renaming(row)))
            if len(ours) != len(theirs):
                problems.append(f"p={p} family {phi}: {len(ours)} expansions, library has {len(theirs)}")
                continue
            for n, ((label, binding, a), b) in enumerate(zip(ours, theirs), 1):
                if a != b:
                    problems.append(f"p={p} family {phi} member {n} {label} {binding.describe()}: "
                                    "presentation differs from the library")
            if len(theirs) != sg.family_sizes(p)[phi - 1]:
                problems.append(f"p={p} family {phi}: library count disagrees with its size table")
    return problems


def structural_check(specs_by_phi, primes) -> list[str]:
    problems = []
    for p in primes:
        ctx = PrimeContext(p)
        for phi, specs in specs_by_phi.items():
            for spec in specs:
                for binding in expand(spec, ctx):
                    g = PcGroup(compile_spec(spec, binding, ctx))
                    where = f"p={p} {spec.label} {binding.describe()}"
                    if not consistency_check(g):
                        problems.append(f"{where}: inconsistent")
                        continue
                    names = g.presentation.names
                    if spec.rank == 6:
                        a1 = g.generator(names.index("a1") + 1)
                        if any(any(g.commutator(a1, x)) for x in g.generators):
                            problems.append(f"{where}: a1 is not central")
                    if not 2 <= phi <= 10:
                        continue
                    Z = I.center(g)
                    seeds = [g.generator(names.index(b) + 1) for b in spec.betas]
                    if I.closure(g, seeds) != Z:
                        problems.append(f"{where}: b-generators do not generate the centre")
                    D = I.derived_subgroup(g)
                    stem = 6 - Z.log_order + _intersection_log(g, D, Z)
                    if stem != spec.rank:
                        problems.append(f"{where}: rank {spec.rank} but stem order p^{stem}")
                    del g, Z
    return problems


def rank6_stem_check(specs_by_phi) -> list[str]:
    """Families 11..43 at p = 7: the stem order is p^6 (trivial centre inside G')."""
    problems = []
    ctx = PrimeContext(7)
    for phi in range(11, 44):
        for spec in specs_by_phi[phi]:
            for binding in expand(spec, ctx):
                g = PcGroup.from_presentation(compile_spec(spec, binding, ctx))
                Z, D = I.center(g), I.derived_subgroup(g)
                stem = 6 - Z.log_order + _intersection_log(g, D, Z)
                if stem != spec.rank:
                    problems.append(f"p=7 {spec.label} {binding.describe()}: rank {spec.rank} "
                                    f"but stem order p^{stem}")
    return problems


def _intersection_log(g, A, B) -> int:
    """log_p |A n B| = log|A| + log|B| - log|AB| (A, B normal)."""
    AB = I.closure(g, list(A.igs) + list(B.igs))
    return A.log_order + B.log_order - AB.log_order


def class_check(lib, specs_by_phi) -> list[str]:
    problems = []
    ctx = PrimeContext(7)
    for phi in range(2, 44):
        blocks = blocks_of(phi, lib[phi])
        for b, spec in zip(blocks, specs_by_phi[phi]):
            for binding in expand(spec, ctx):
                g = PcGroup.from_presentation(compile_spec(spec, binding, ctx))
                c = len(I.lower_central_series(g)) - 1
                if b.row.class_bound and c > b.row.class_bound:
                    problems.append(f"{spec.label} {binding.describe()}: class {c} > bound {b.row.class_bound}")
    return problems


# -- driver ---------------------------------------------------------------------------

def build(lib) -> dict[int, str]:
    files = {1: "convention bracket=left-normed order=ij\n\n" + "\n".join(abelian_blocks())}
    for phi in range(2, 44):
        texts = [block_text(b) for b in blocks_of(phi, lib[phi])]
        if phi <= 10:
            out = []
            for t in texts:
                spec = parse(t)[0]
                betas = choose_betas([spec])
                if betas is None:
                    raise SystemExit(f"family {phi}: no centre basis among {spec.label}'s generators")
                out.append(with_betas(t, betas))
            texts = out
        files[phi] = "convention bracket=left-normed order=ij\n\n" + "\n".join(texts)
    # canonical form
    return {phi: HEADER.format(phi=phi) + "\n" + serialize(parse(src)) for phi, src in files.items()}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--gap", default="/root/notes/gapsrc", help="smallgrp package directory")
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/p6groups/data"))
    ap.add_argument("--primes", default=",".join(map(str, CHECK_PRIMES)))
    ap.add_argument("--skip-checks", action="store_true")
    args = ap.parse_args(argv)

    lib = sg.load(args.gap)
    files = build(lib)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for phi, text in files.items():
        (out / f"phi{phi:02d}.p6").write_text(text)
    print(f"wrote {len(files)} files to {out}")
    if args.skip_checks:
        return 0

    specs_by_phi = {phi: parse(text) for phi, text in files.items()}
    for phi, text in files.items():
        assert serialize(specs_by_phi[phi]) == text[text.index("convention"):], phi
    primes = [int(x) for x in args.primes.split(",")]
    problems = cross_check(lib, specs_by_phi, primes)
    print(f"library cross-check: {len(problems)} problems", flush=True)
    problems += structural_check(specs_by_phi, [7, 11, 13])
    problems += rank6_stem_check(specs_by_phi)
    problems += class_check(lib, specs_by_phi)
    for line in problems[:50]:
        print("  " + line)
    print("OK" if not problems else f"{len(problems)} problems")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
