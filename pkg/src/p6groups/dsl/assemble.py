"""Turn concrete relation words into a PcPresentation.

Relations arrive as words over named generators with integer exponents.
The generators are first placed in a composition-series order (every
right-hand side below its left-hand generators), then right-hand sides are
collected level by level, so each word is evaluated with the relations of
the generators beneath it already in force.
"""

from __future__ import annotations

import heapq
from typing import Mapping, Sequence

from ..errors import MalformedSpec
from ..pcgroup import PcGroup, PcPresentation

Word = Sequence[tuple[str, int]]


def series_order(names: Sequence[str], powers: Mapping[str, Word],
                 comms: Mapping[tuple[str, str], Word],
                 priority: Mapping[str, int] | None = None) -> list[str]:
    """A stable order with every right-hand-side generator below its relation.

    Ties go to the smallest ``priority`` value (default: position in names).
    """
    rank = {x: i for i, x in enumerate(names)}
    prio = dict(priority or rank)
    below: dict[str, set[str]] = {x: set() for x in names}
    for x, w in powers.items():
        below[x] |= {g for g, e in w if e}
    for (x, y), w in comms.items():
        deps = {g for g, e in w if e}
        below[x] |= deps
        below[y] |= deps
    for x, deps in below.items():
        if x in deps:
            raise MalformedSpec(f"generator {x} occurs in the right-hand side of its own relation")
    waiting = {x: len(d) for x, d in below.items()}
    above: dict[str, list[str]] = {x: [] for x in names}
    for x, deps in below.items():
        for d in deps:
            above[d].append(x)
    ready = [(prio[x], rank[x], x) for x, k in waiting.items() if k == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        _, _, x = heapq.heappop(ready)
        order.append(x)
        for y in above[x]:
            waiting[y] -= 1
            if waiting[y] == 0:
                heapq.heappush(ready, (prio[y], rank[y], y))
    if len(order) != len(names):
        stuck = sorted(set(names) - set(order), key=rank.get)
        raise MalformedSpec(f"relations admit no composition-series order (cycle through {stuck})")
    return order


def assemble(p: int, names: Sequence[str], powers: Mapping[str, Word],
             comms: Mapping[tuple[str, str], Word],
             priority: Mapping[str, int] | None = None) -> PcPresentation:
    """Build the presentation; ``comms[(x, y)]`` is the value of [x, y]."""
    order = series_order(names, powers, comms, priority)
    pos = {x: i + 1 for i, x in enumerate(order)}
    n = len(order)

    # level i holds relations whose right-hand side lies below generator i
    levels: dict[int, list] = {i: [] for i in range(1, n + 1)}
    for x, w in powers.items():
        levels[pos[x]].append(("pow", pos[x], list(w), False))
    for (x, y), w in comms.items():
        j, i = pos[x], pos[y]
        if j == i:
            raise MalformedSpec(f"commutator [{x},{y}] has equal entries")
        # [x, y] = w  is stored as  [y, x] = w^-1  when x lies below y
        flip = j < i
        hi, lo = (i, j) if flip else (j, i)
        levels[lo].append(("comm", (hi, lo), list(w), flip))

    power_rhs = [(0,) * n for _ in range(n)]
    comm_rhs: dict[tuple[int, int], tuple[int, ...]] = {}
    group = None
    for level in range(1, n + 1):
        if levels[level]:
            if group is None or level > 1:
                pres = PcPresentation(n, p, tuple(power_rhs), dict(comm_rhs), tuple(order))
                group = PcGroup(pres, allow_unverified=True)
            for kind, key, w, flip in levels[level]:
                word = [(pos[g], e) for g, e in w if e]
                if flip:
                    word = [(g, -e) for g, e in reversed(word)]
                for g, _ in word:
                    if g >= level:
                        raise MalformedSpec(
                            f"relation for {order[level - 1]} uses {order[g - 1]}, which is not below it")
                v = group._collect(word)
                if kind == "pow":
                    power_rhs[key - 1] = v
                else:
                    comm_rhs[key] = v
    return PcPresentation(n, p, tuple(power_rhs), comm_rhs, tuple(order))
