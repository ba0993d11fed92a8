"""Admissible diagonal maps and their isomorphism classes.

A diagonal map ``d`` (``d[x] = x*x``) is a functional digraph.  Every
component is a directed cycle whose vertices root in-trees.  Canonical forms
and automorphism counts are computed from that decomposition: each in-tree
gets an AHU-style nested-tuple code, each cycle the least rotation of its
root codes, and the whole map the sorted multiset of component codes.

Admissibility is three pair-accounting conditions:

* no 2-cycles,
* every vertex has tail-degree congruent to n-1 mod 2,
* C(n, 2) - (n - i) is divisible by 3, with i the number of fixed points.

In the cycle/tree picture the parity condition reads: a cycle vertex (fixed
points included) has a number of in-tree children congruent to n-1, and
every other vertex has the opposite parity.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

Code = tuple  # nested tuple: sorted tuple of child codes


@dataclass(frozen=True)
class DiagonalClass:
    order: int
    rep: tuple[int, ...]
    idempotents: int
    aut_order: int
    labeled_count: int
    key: bytes

    def line(self) -> str:
        d = ",".join(str(v) for v in self.rep)
        return f"i={self.idempotents} aut={self.aut_order} labeled={self.labeled_count} d={d}"


def tail_degrees(d: Sequence[int]) -> list[int]:
    deg = [0] * len(d)
    for x, y in enumerate(d):
        if x != y:
            deg[x] += 1
            deg[y] += 1
    return deg


def has_two_cycle(d: Sequence[int]) -> bool:
    return any(x != y and d[y] == x for x, y in enumerate(d))


def is_admissible(d: Sequence[int]) -> bool:
    """Direct check of the three necessary conditions on a labeled map."""
    n = len(d)
    if has_two_cycle(d):
        return False
    if any((deg - (n - 1)) % 2 for deg in tail_degrees(d)):
        return False
    i = sum(1 for x, y in enumerate(d) if x == y)
    return (n * (n - 1) // 2 - (n - i)) % 3 == 0


# -- decomposition --------------------------------------------------------------

def _cycle_flags(d: Sequence[int]) -> list[bool]:
    n = len(d)
    indeg = [0] * n
    for y in d:
        indeg[y] += 1
    on_cycle = [True] * n
    stack = [x for x in range(n) if indeg[x] == 0]
    while stack:
        x = stack.pop()
        on_cycle[x] = False
        y = d[x]
        indeg[y] -= 1
        if indeg[y] == 0:
            stack.append(y)
    return on_cycle


def _least_rotation(seq: list) -> int:
    L = len(seq)
    return min(range(L), key=lambda r: seq[r:] + seq[:r])


class _Decomposition:
    def __init__(self, d: Sequence[int]):
        n = len(d)
        self.d = d
        on_cycle = _cycle_flags(d)
        children: list[list[int]] = [[] for _ in range(n)]
        for x, y in enumerate(d):
            if not on_cycle[x]:
                children[y].append(x)
        self.children = children
        self.codes: list[Code | None] = [None] * n
        for x in range(n):
            self._code(x)
        comps = []
        seen = [False] * n
        for c in range(n):
            if not on_cycle[c] or seen[c]:
                continue
            cyc = [c]
            seen[c] = True
            y = d[c]
            while y != c:
                cyc.append(y)
                seen[y] = True
                y = d[y]
            seq = [self.codes[v] for v in cyc]
            r = _least_rotation(seq)
            cyc = cyc[r:] + cyc[:r]
            comps.append((tuple(self.codes[v] for v in cyc), cyc))
        comps.sort(key=lambda item: item[0])
        self.components = comps

    def _code(self, v: int) -> Code:
        # iterative post-order; trees can be as deep as n
        if self.codes[v] is not None:
            return self.codes[v]
        stack = [(v, False)]
        while stack:
            x, done = stack.pop()
            if done:
                self.codes[x] = tuple(sorted(self.codes[c] for c in self.children[x]))
                continue
            stack.append((x, True))
            stack.extend((c, False) for c in self.children[x] if self.codes[c] is None)
        return self.codes[v]

    def code(self) -> tuple:
        return tuple(code for code, _ in self.components)

    def labeling(self) -> list[int]:
        """Vertex order determined by the codes (ties are automorphic)."""
        order: list[int] = []
        for _, cyc in self.components:
            order.extend(cyc)
            for c in cyc:
                stack = sorted(self.children[c], key=lambda u: self.codes[u], reverse=True)
                while stack:
                    u = stack.pop()
                    order.append(u)
                    stack.extend(sorted(self.children[u], key=lambda w: self.codes[w], reverse=True))
        label = [0] * len(order)
        for pos, v in enumerate(order):
            label[v] = pos
        return label


def canonical_map(d: Sequence[int]) -> tuple[int, ...]:
    """The canonical relabeling of ``d``; equal for isomorphic maps."""
    label = _Decomposition(d).labeling()
    out = [0] * len(d)
    for x, y in enumerate(d):
        out[label[x]] = label[y]
    return tuple(out)


def diagonal_canonical_form(d: Sequence[int]) -> bytes:
    if has_two_cycle(d):
        raise ValueError("diagonal map has a 2-cycle")
    n = len(d)
    if n > 255:
        raise ValueError("order above 255 is not supported")
    return bytes([n]) + bytes(canonical_map(d))


def _tree_aut(code: Code) -> int:
    total = 1
    for child, mult in Counter(code).items():
        total *= _tree_aut(child) ** mult * math.factorial(mult)
    return total


def _component_aut(comp: tuple) -> int:
    L = len(comp)
    period = next(r for r in range(1, L + 1) if L % r == 0 and comp[r:] + comp[:r] == comp)
    total = L // period
    for root in comp:
        total *= _tree_aut(root)
    return total


def automorphism_order(d: Sequence[int]) -> int:
    """Number of permutations s with s(d(x)) = d(s(x)) for all x."""
    return _code_aut(_Decomposition(d).code())


def _code_aut(code: tuple) -> int:
    total = 1
    for comp, mult in Counter(code).items():
        total *= _component_aut(comp) ** mult * math.factorial(mult)
    return total


# -- admissible idempotent counts ---------------------------------------------

def _sums(sizes: set[int], limit: int, caps: int) -> list[set[int]]:
    """``out[k]`` = totals reachable with a multiset of ``k`` parts (k capped at ``caps``,
    the last slot collecting everything larger), each part from ``sizes``."""
    out = [set() for _ in range(caps + 1)]
    out[0].add(0)
    changed = True
    while changed:
        changed = False
        for k in range(caps + 1):
            for s in list(out[k]):
                for m in sizes:
                    t = s + m
                    if t <= limit:
                        k2 = min(k + 1, caps)
                        if t not in out[k2]:
                            out[k2].add(t)
                            changed = True
    return out


def _parity_sums(sizes: set[int], limit: int) -> tuple[set[int], set[int]]:
    even: set[int] = {0}
    odd: set[int] = set()
    changed = True
    while changed:
        changed = False
        for src, dst in ((even, odd), (odd, even)):
            for s in list(src):
                for m in sizes:
                    t = s + m
                    if t <= limit and t not in dst:
                        dst.add(t)
                        changed = True
    return even, odd


def admissible_idempotent_counts(n: int) -> list[int]:
    if n < 1:
        raise ValueError("order must be positive")
    p = (n - 1) % 2
    tree_sizes: set[int] = set()
    for m in range(1, n + 1):
        even, odd = _parity_sums({s for s in tree_sizes if s < m}, m - 1)
        if m - 1 in (odd if (p + 1) % 2 else even):
            tree_sizes.add(m)
    even, odd = _parity_sums(tree_sizes, n - 1)
    root_sizes = {m for m in range(1, n + 1) if m - 1 in (odd if p else even)}
    cycle_sizes = _sums(root_sizes, n, 3)[3]
    # knapsack over (vertices used, fixed points)
    reach = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        nxt = []
        for used, fixed in frontier:
            for m in root_sizes:
                st = (used + m, fixed + 1)
                if st[0] <= n and st not in reach:
                    reach.add(st)
                    nxt.append(st)
            for m in cycle_sizes:
                st = (used + m, fixed)
                if st[0] <= n and st not in reach:
                    reach.add(st)
                    nxt.append(st)
        frontier = nxt
    total_pairs = n * (n - 1) // 2
    return sorted(i for used, i in reach if used == n and (total_pairs - (n - i)) % 3 == 0)


# -- structural generation ----------------------------------------------------

def _multisets(items: list[tuple[int, Code]], total: int, parity: int, start: int = 0) -> Iterator[list[Code]]:
    """Multisets (as non-decreasing index sequences) of ``(size, code)`` items with the
    given total size and count parity."""
    if total == 0:
        if parity == 0:
            yield []
        return
    for idx in range(start, len(items)):
        size, code = items[idx]
        if size > total:
            continue
        for rest in _multisets(items, total - size, parity ^ 1, idx):
            yield [code] + rest


def _necklaces(roots: list[tuple[int, Code]], total: int, length_min: int) -> Iterator[tuple]:
    """Sequences of roots with the given total size, length >= length_min, that are
    their own least rotation."""
    def extend(prefix: list[Code], remaining: int):
        if remaining == 0:
            if len(prefix) >= length_min and prefix[_least_rotation(prefix):] + prefix[:_least_rotation(prefix)] == prefix:
                yield tuple(prefix)
            return
        for size, code in roots:
            if size <= remaining:
                prefix.append(code)
                yield from extend(prefix, remaining - size)
                prefix.pop()

    yield from extend([], total)


def _code_size(code: Code) -> int:
    return 1 + sum(_code_size(c) for c in code)


def _build_map(graph_code: tuple) -> list[int]:
    """Materialize a labeled map realizing the given graph code."""
    d: list[int] = []

    def new_vertex(target: int | None) -> int:
        d.append(-1 if target is None else target)
        return len(d) - 1

    def attach(code: Code, parent: int):
        for child in code:
            v = new_vertex(parent)
            attach(child, v)

    for comp in graph_code:
        cyc = [new_vertex(None) for _ in comp]
        for j, v in enumerate(cyc):
            d[v] = cyc[(j + 1) % len(cyc)]
        for root, v in zip(comp, cyc):
            attach(root, v)
    return d


def generate_diagonal_classes(n: int) -> list[DiagonalClass]:
    if n < 1:
        raise ValueError("order must be positive")
    p = (n - 1) % 2
    q = p ^ 1
    # in-tree codes of non-cycle vertices, by size
    trees: list[tuple[int, Code]] = []
    for m in range(1, n + 1):
        small = [item for item in trees if item[0] < m]
        found = {tuple(sorted(ms)) for ms in _multisets(small, m - 1, q)}
        trees.extend((m, code) for code in sorted(found))
    roots: list[tuple[int, Code]] = []
    for m in range(1, n + 1):
        found = {tuple(sorted(ms)) for ms in _multisets(trees, m - 1, p)}
        roots.extend((m, code) for code in sorted(found))
    comps: list[tuple[int, tuple]] = []
    for m in range(1, n + 1):
        comps.extend((m, (code,)) for size, code in roots if size == m)
        comps.extend((m, neck) for neck in _necklaces(roots, m, 3))
    total_pairs = n * (n - 1) // 2
    out: dict[bytes, DiagonalClass] = {}
    for ms in _multisets_any(comps, n):
        graph_code = tuple(sorted(ms))
        i = sum(1 for comp in graph_code if len(comp) == 1)
        if (total_pairs - (n - i)) % 3:
            continue
        d = _build_map(graph_code)
        key = diagonal_canonical_form(d)
        if key in out:
            raise AssertionError("structural generation produced a duplicate class")
        aut = _code_aut(graph_code)
        out[key] = DiagonalClass(
            order=n,
            rep=tuple(key[1:]),
            idempotents=i,
            aut_order=aut,
            labeled_count=math.factorial(n) // aut,
            key=key,
        )
    return sorted(out.values(), key=lambda c: (c.idempotents, c.key))


def _multisets_any(items: list[tuple[int, tuple]], total: int, start: int = 0) -> Iterator[list]:
    if total == 0:
        yield []
        return
    for idx in range(start, len(items)):
        size, code = items[idx]
        if size > total:
            continue
        for rest in _multisets_any(items, total - size, idx):
            yield [code] + rest


def bruteforce_diagonal_classes(n: int) -> dict[bytes, int]:
    """Key -> number of labeled admissible maps, by exhausting all n**n maps."""
    counts: Counter[bytes] = Counter()
    for d in product(range(n), repeat=n):
        if is_admissible(d):
            counts[diagonal_canonical_form(d)] += 1
    return dict(counts)


def identity_class(n: int) -> DiagonalClass | None:
    d = tuple(range(n))
    if not is_admissible(d):
        return None
    return _class_of(d)


def constant_class(n: int) -> DiagonalClass | None:
    d = tuple([0] * n)
    if not is_admissible(d):
        return None
    return _class_of(d)


def _class_of(d: Sequence[int]) -> DiagonalClass:
    n = len(d)
    key = diagonal_canonical_form(d)
    aut = automorphism_order(d)
    return DiagonalClass(
        order=n,
        rep=tuple(key[1:]),
        idempotents=sum(1 for x, y in enumerate(d) if x == y),
        aut_order=aut,
        labeled_count=math.factorial(n) // aut,
        key=key,
    )


def count_by_idempotents(classes: list[DiagonalClass]) -> dict[int, int]:
    return dict(sorted(Counter(c.idempotents for c in classes).items()))
