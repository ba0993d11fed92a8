"""Canonical labeling and automorphism order of totally symmetric quasigroups.

The quasigroup is encoded as a vertex-colored graph: one vertex per element,
one per block, membership edges between them, a directed arc ``x -> d[x]``
for every non-idempotent element and a loop on every idempotent one.  Graph
isomorphisms restricted to the element vertices are exactly the quasigroup
isomorphisms.

Canonical labeling is individualization-refinement over that graph.  Only
element cells are individualized (once the elements are discrete, every
block vertex is too).  The certificate of a leaf is the key it induces, so
the canonical key is the least key over all leaves.  The automorphism
group order is accumulated from orbits along the first path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

from .core import TripleSystem
from .errors import RefusalError, StructureError

ELEMENT, BLOCK = 0, 1


@dataclass(frozen=True)
class EncodedGraph:
    order: int
    blocks: tuple[tuple[int, int, int], ...]
    colors: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    arcs: tuple[tuple[int, int], ...]
    loops: tuple[int, ...]

    @property
    def vertex_count(self) -> int:
        return len(self.colors)


@dataclass(frozen=True)
class CanonicalRecord:
    key: bytes
    aut_order: int
    labeling: tuple[int, ...]  # element x -> canonical label

    @property
    def hex(self) -> str:
        return self.key.hex()


def encode(s: TripleSystem) -> EncodedGraph:
    n = s.order
    colors = [ELEMENT] * n + [BLOCK] * len(s.triples)
    edges = []
    for i, t in enumerate(s.triples):
        for x in t:
            edges.append((x, n + i))
    arcs = tuple((x, y) for x, y in enumerate(s.diag) if x != y)
    loops = tuple(x for x, y in enumerate(s.diag) if x == y)
    return EncodedGraph(n, s.triples, tuple(colors), tuple(edges), arcs, loops)


def decode(g: EncodedGraph) -> TripleSystem:
    n = g.order
    diag = list(range(n))
    for x, y in g.arcs:
        diag[x] = y
    members: dict[int, list[int]] = {}
    for x, b in g.edges:
        members.setdefault(b, []).append(x)
    triples = [tuple(sorted(members[b])) for b in sorted(members)]
    return TripleSystem(n, tuple(diag), tuple(triples))


# -- key serialization ----------------------------------------------------------

def _varint(v: int, out: bytearray) -> None:
    while True:
        b = v & 0x7F
        v >>= 7
        if v:
            out.append(b | 0x80)
        else:
            out.append(b)
            return


def make_key(n: int, diag: Sequence[int], triples: Sequence[tuple[int, int, int]], label: Sequence[int]) -> bytes:
    """Serialize the system relabeled by ``label``.

    Layout: order byte, relabeled diagonal images, then the sorted block list
    with each block packed as ``(a*n + b)*n + c`` and delta-encoded as varints.
    """
    out = bytearray([n])
    dd = [0] * n
    for x in range(n):
        dd[label[x]] = label[diag[x]]
    out.extend(dd)
    codes = []
    nn = n * n
    for a, b, c in triples:
        a, b, c = label[a], label[b], label[c]
        if a > b:
            a, b = b, a
        if b > c:
            b, c = c, b
            if a > b:
                a, b = b, a
        codes.append(a * nn + b * n + c)
    codes.sort()
    prev = 0
    for code in codes:
        _varint(code - prev, out)
        prev = code
    return bytes(out)


def decode_key(key: bytes) -> TripleSystem:
    if not key:
        raise StructureError("empty key")
    n = key[0]
    if len(key) < 1 + n:
        raise StructureError("key truncated inside diagonal")
    diag = tuple(key[1:1 + n])
    triples = []
    pos = 1 + n
    prev = 0
    while pos < len(key):
        v = shift = 0
        while True:
            if pos >= len(key):
                raise StructureError("key truncated inside block list")
            b = key[pos]
            pos += 1
            v |= (b & 0x7F) << shift
            shift += 7
            if not b & 0x80:
                break
        prev += v
        triples.append((prev // (n * n), prev // n % n, prev % n))
    return TripleSystem(n, diag, tuple(triples))


# -- individualization-refinement --------------------------------------------

class _Refiner:
    def __init__(self, g: EncodedGraph):
        V = g.vertex_count
        self.V = V
        self.n = g.order
        und = [[] for _ in range(V)]
        out = [[] for _ in range(V)]
        inn = [[] for _ in range(V)]
        for a, b in g.edges:
            und[a].append(b)
            und[b].append(a)
        for a, b in g.arcs:
            out[a].append(b)
            inn[b].append(a)
        self.und = und
        self.out = out
        self.inn = inn
        loop = [0] * V
        for x in g.loops:
            loop[x] = 1
        seeds = [(g.colors[v], loop[v], len(inn[v]), len(out[v]), len(und[v])) for v in range(V)]
        self.initial = self._relabel(seeds)

    @staticmethod
    def _relabel(sigs: list) -> list[int]:
        order = sorted(range(len(sigs)), key=sigs.__getitem__)
        colors = [0] * len(sigs)
        prev = None
        start = 0
        for pos, v in enumerate(order):
            if sigs[v] != prev:
                prev = sigs[v]
                start = pos
            colors[v] = start
        return colors

    def refine(self, c: list[int]) -> list[int]:
        """Coarsest equitable refinement; colors are cell start positions."""
        und, out, inn = self.und, self.out, self.inn
        ncells = len(set(c))
        V = self.V
        while ncells < V:
            sigs = [
                (
                    c[v],
                    sorted([c[u] for u in und[v]]),
                    [c[u] for u in out[v]],
                    sorted([c[u] for u in inn[v]]),
                )
                for v in range(V)
            ]
            c = self._relabel(sigs)
            k = len(set(c))
            if k == ncells:
                break
            ncells = k
        return c


class _Search:
    def __init__(self, s: TripleSystem):
        self.s = s
        self.n = s.order
        self.refiner = _Refiner(encode(s))
        self.first_key: bytes | None = None
        self.first_label: list[int] | None = None
        self.best_key: bytes | None = None
        self.best_label: list[int] | None = None
        self.generators: list[list[int]] = []
        self.first_path: list[int] = []
        self.aut_order = 1

    def target_cell(self, c: list[int]) -> list[int] | None:
        cells: dict[int, list[int]] = {}
        for x in range(self.n):
            cells.setdefault(c[x], []).append(x)
        best = None
        for start in sorted(cells):
            cell = cells[start]
            if len(cell) > 1 and (best is None or len(cell) > len(best)):
                best = cell
        return best

    @staticmethod
    def individualize(c: list[int], v: int) -> list[int]:
        s = c[v]
        c2 = [col + 1 if col == s else col for col in c]
        c2[v] = s
        return c2

    def orbit_rep(self, prefix: list[int], cell: list[int]) -> dict[int, int]:
        """Union-find roots of ``cell`` under generators fixing ``prefix``."""
        parent = {x: x for x in range(self.n)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for gen in self.generators:
            if all(gen[p] == p for p in prefix):
                for x in range(self.n):
                    a, b = find(x), find(gen[x])
                    if a != b:
                        parent[max(a, b)] = min(a, b)
        return {x: find(x) for x in cell}

    def leaf(self, c: list[int]) -> bool:
        """Process a leaf; True when it is equivalent to the first leaf."""
        label = c[: self.n]
        key = make_key(self.n, self.s.diag, self.s.triples, label)
        if self.first_key is None:
            self.first_key = self.best_key = key
            self.first_label = self.best_label = label
            return False
        if key == self.first_key:
            self._add_generator(self.first_label, label)
            return True
        if key == self.best_key:
            self._add_generator(self.best_label, label)
        elif key < self.best_key:
            self.best_key, self.best_label = key, label
        return False

    def _add_generator(self, ref: list[int], label: list[int]) -> None:
        inv = [0] * self.n
        for x, lab in enumerate(label):
            inv[lab] = x
        self.generators.append([inv[ref[x]] for x in range(self.n)])

    def run(self) -> None:
        c = self.refiner.refine(self.refiner.initial)
        self._first(c)

    def _first(self, c: list[int]) -> None:
        cell = self.target_cell(c)
        if cell is None:
            self.leaf(c)
            return
        v0 = cell[0]
        prefix = list(self.first_path)
        self.first_path.append(v0)
        self._first(self.refiner.refine(self.individualize(c, v0)))
        explored = [v0]
        for w in cell[1:]:
            roots = self.orbit_rep(prefix, cell)
            if any(roots[w] == roots[u] for u in explored):
                continue
            explored.append(w)
            self._other(self.refiner.refine(self.individualize(c, w)), prefix + [w])
        roots = self.orbit_rep(prefix, cell)
        self.aut_order *= sum(1 for x in cell if roots[x] == roots[v0])

    def _other(self, c: list[int], prefix: list[int]) -> bool:
        """Search off the first path; True aborts back to the first-path node."""
        cell = self.target_cell(c)
        if cell is None:
            return self.leaf(c)
        explored: list[int] = []
        for w in cell:
            if explored:
                roots = self.orbit_rep(prefix, cell)
                if any(roots[w] == roots[u] for u in explored):
                    continue
            explored.append(w)
            if self._other(self.refiner.refine(self.individualize(c, w)), prefix + [w]):
                return True
        return False


def canonical(s: TripleSystem) -> CanonicalRecord:
    search = _Search(s)
    search.run()
    return CanonicalRecord(search.best_key, search.aut_order, tuple(search.best_label))


def canonical_key(s: TripleSystem) -> bytes:
    return canonical(s).key


def is_automorphism(s: TripleSystem, perm: Sequence[int]) -> bool:
    return s.relabel(perm) == s


def aut_order_bruteforce(s: TripleSystem) -> int:
    if s.order > 8:
        raise RefusalError(f"brute-force automorphism count refused for order {s.order} > 8")
    diag = s.diag
    blocks = set(s.triples)
    count = 0
    for perm in permutations(range(s.order)):
        if any(perm[diag[x]] != diag[perm[x]] for x in range(s.order)):
            continue
        if all(tuple(sorted((perm[a], perm[b], perm[c]))) in blocks for a, b, c in s.triples):
            count += 1
    return count


def isomorphic_bruteforce(s1: TripleSystem, s2: TripleSystem) -> bool:
    if s1.order != s2.order:
        return False
    if s1.order > 8:
        raise RefusalError(f"brute-force isomorphism test refused for order {s1.order} > 8")
    return any(s1.relabel(p) == s2 for p in permutations(range(s1.order)))


def labeled_size(n: int, aut_order: int) -> int:
    return math.factorial(n) // aut_order
