"""Quasigroup data model and single-quasigroup property predicates.

Two equivalent forms are used throughout:

* ``CayleyTable`` - the n x n multiplication table (a Latin square when the
  operation is a quasigroup).
* ``TripleSystem`` - the diagonal map ``d[x] = x*x`` together with the set of
  3-element blocks ``{x, y, x*y}`` for distinct, non-tail pairs.  For a totally
  symmetric quasigroup this determines the table completely and is about six
  times smaller, so it is the form the solver and canonizer work on.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, StructureError

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class CayleyTable:
    order: int
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.order
        if not isinstance(n, int) or n < 1:
            raise StructureError(f"order must be a positive integer, got {n!r}")
        if len(self.cells) != n:
            raise StructureError(f"expected {n} rows, got {len(self.cells)}")
        for r, row in enumerate(self.cells):
            if len(row) != n:
                raise StructureError(f"row {r} has {len(row)} entries, expected {n}")
            for v in row:
                if not isinstance(v, (int, np.integer)) or not 0 <= v < n:
                    raise StructureError(f"symbol {v!r} in row {r} outside 0..{n - 1}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> CayleyTable:
        cells = tuple(tuple(int(v) for v in row) for row in rows)
        return cls(len(cells), cells)

    def __getitem__(self, x: int) -> tuple[int, ...]:
        return self.cells[x]

    def as_array(self) -> np.ndarray:
        return np.array(self.cells, dtype=np.int64).reshape(self.order, self.order)

    def relabel(self, perm: Sequence[int]) -> CayleyTable:
        """Image under the bijection ``x -> perm[x]`` on rows, columns and symbols."""
        n = self.order
        out = [[0] * n for _ in range(n)]
        for x in range(n):
            row = self.cells[x]
            px = perm[x]
            for y in range(n):
                out[px][perm[y]] = perm[row[y]]
        return CayleyTable.from_rows(out)


@dataclass(frozen=True)
class TripleSystem:
    """Diagonal map plus triangle blocks; see the module docstring.

    ``triples`` is stored as a sorted tuple of sorted 3-tuples so that equal
    systems compare and hash equal.
    """

    order: int
    diag: tuple[int, ...]
    triples: tuple[Triple, ...]

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(int(v) for v in self.diag))
        object.__setattr__(
            self, "triples", tuple(sorted(tuple(sorted(int(v) for v in t)) for t in self.triples))
        )
        check_triple_system(self.order, self.diag, self.triples)

    @classmethod
    def unchecked(cls, order: int, diag: tuple[int, ...], triples: tuple[Triple, ...]) -> TripleSystem:
        """Build without validation.  ``triples`` must already be normalized."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "order", order)
        object.__setattr__(obj, "diag", diag)
        object.__setattr__(obj, "triples", triples)
        return obj

    @property
    def idempotents(self) -> int:
        return sum(1 for x, y in enumerate(self.diag) if x == y)

    def tail_edges(self) -> list[tuple[int, int]]:
        return [(min(x, y), max(x, y)) for x, y in enumerate(self.diag) if x != y]

    def relabel(self, perm: Sequence[int]) -> TripleSystem:
        n = self.order
        diag = [0] * n
        for x, y in enumerate(self.diag):
            diag[perm[x]] = perm[y]
        triples = tuple(sorted(tuple(sorted((perm[a], perm[b], perm[c]))) for a, b, c in self.triples))
        return TripleSystem.unchecked(n, tuple(diag), triples)


@dataclass(frozen=True)
class PropertyFlags:
    medial: bool = False
    idempotent: bool = False
    unipotent: bool = False
    associative: bool = False

    def to_byte(self) -> int:
        return (
            int(self.medial)
            | int(self.idempotent) << 1
            | int(self.unipotent) << 2
            | int(self.associative) << 3
        )

    @classmethod
    def from_byte(cls, b: int) -> PropertyFlags:
        if b & ~0xF:
            raise ValueError(f"unknown flag bits in {b:#x}")
        return cls(bool(b & 1), bool(b & 2), bool(b & 4), bool(b & 8))

    def names(self) -> list[str]:
        return [name for name in FLAG_NAMES if getattr(self, name)]


FLAG_NAMES = ("medial", "idempotent", "unipotent", "associative")


def check_triple_system(n: int, diag: Sequence[int], triples: Iterable[Triple]) -> None:
    """Raise ``DomainError`` unless every pair is covered exactly once."""
    if not isinstance(n, int) or n < 1:
        raise StructureError(f"order must be a positive integer, got {n!r}")
    if len(diag) != n:
        raise StructureError(f"diagonal has length {len(diag)}, expected {n}")
    for v in diag:
        if not 0 <= v < n:
            raise StructureError(f"diagonal image {v} outside 0..{n - 1}")
    covered: set[tuple[int, int]] = set()
    for x, y in enumerate(diag):
        if x == y:
            continue
        if diag[y] == x:
            raise DomainError(f"diagonal has a 2-cycle on {{{x}, {y}}}")
        covered.add((min(x, y), max(x, y)))
    for t in triples:
        if len(t) != 3 or len(set(t)) != 3:
            raise DomainError(f"block {t!r} is not three distinct symbols")
        for v in t:
            if not 0 <= v < n:
                raise StructureError(f"block symbol {v} outside 0..{n - 1}")
        for a, b in combinations(sorted(t), 2):
            if (a, b) in covered:
                raise DomainError(f"pair {{{a}, {b}}} covered twice")
            covered.add((a, b))
    missing = n * (n - 1) // 2 - len(covered)
    if missing:
        raise DomainError(f"{missing} pair(s) left uncovered")


def _coerce(t) -> CayleyTable:
    if isinstance(t, CayleyTable):
        return t
    return CayleyTable.from_rows(t)


def is_latin(t) -> bool:
    t = _coerce(t)
    full = set(range(t.order))
    if any(set(row) != full for row in t.cells):
        return False
    return all(set(col) == full for col in zip(*t.cells))


def _require_latin(t: CayleyTable) -> None:
    if not is_latin(t):
        raise DomainError("not a Latin square")


def is_totally_symmetric(t) -> bool:
    t = _coerce(t)
    _require_latin(t)
    c = t.cells
    for x in range(t.order):
        for y in range(t.order):
            z = c[x][y]
            if c[x][z] != y or c[y][x] != z or c[y][z] != x or c[z][x] != y or c[z][y] != x:
                return False
    return True


def to_triples(t) -> TripleSystem:
    t = _coerce(t)
    if not is_totally_symmetric(t):
        raise DomainError("table is not totally symmetric")
    c = t.cells
    n = t.order
    diag = tuple(c[x][x] for x in range(n))
    blocks = set()
    for x in range(n):
        for y in range(x + 1, n):
            z = c[x][y]
            if z != x and z != y:
                blocks.add(tuple(sorted((x, y, z))))
    return TripleSystem(n, diag, tuple(blocks))


def from_triples(s: TripleSystem) -> CayleyTable:
    n = s.order
    cells = [[-1] * n for _ in range(n)]
    for x, y in enumerate(s.diag):
        cells[x][x] = y
        if x != y:
            # x*x = y forces x*y = y*x = x
            cells[x][y] = cells[y][x] = x
    for a, b, c in s.triples:
        cells[a][b] = cells[b][a] = c
        cells[a][c] = cells[c][a] = b
        cells[b][c] = cells[c][b] = a
    return CayleyTable(n, tuple(tuple(row) for row in cells))


def is_medial(t) -> bool:
    """(wx)(yz) == (wy)(xz) for all quadruples."""
    t = _coerce(t)
    a = t.as_array()
    # lhs[w, x, y, z] = (wx)(yz); swapping x and y gives the right-hand side
    lhs = a[a[:, :, None, None], a[None, None, :, :]]
    return bool(np.array_equal(lhs, lhs.transpose(0, 2, 1, 3)))


def is_idempotent(t) -> bool:
    t = _coerce(t)
    return all(t.cells[x][x] == x for x in range(t.order))


def is_unipotent(t) -> int | None:
    """Return k if x*x == k for every x, else None."""
    t = _coerce(t)
    k = t.cells[0][0]
    if all(t.cells[x][x] == k for x in range(t.order)):
        return k
    return None


def is_associative(t) -> bool:
    t = _coerce(t)
    a = t.as_array()
    n = t.order
    left = a[a]  # left[x, y, z] = (xy)z
    right = a[np.arange(n)[:, None, None], a[None, :, :]]  # x(yz)
    return bool(np.array_equal(left, right))


def identity_element(t) -> int | None:
    t = _coerce(t)
    n = t.order
    ident = tuple(range(n))
    for e in range(n):
        if t.cells[e] == ident and all(t.cells[x][e] == x for x in range(n)):
            return e
    return None


def is_elementary_abelian_2(t) -> bool:
    t = _coerce(t)
    n = t.order
    if n & (n - 1):
        return False
    if not is_latin(t) or not is_associative(t):
        return False
    e = identity_element(t)
    if e is None:
        return False
    c = t.cells
    if any(c[x][y] != c[y][x] for x in range(n) for y in range(x + 1, n)):
        return False
    return all(c[x][x] == e for x in range(n))


def derived_addition(t, p: int) -> CayleyTable:
    """The addition ``x + y = p(xy)`` with ``p`` as zero."""
    t = _coerce(t)
    if not 0 <= p < t.order:
        raise DomainError(f"base point {p} outside 0..{t.order - 1}")
    if not is_totally_symmetric(t):
        raise DomainError("table is not totally symmetric")
    prow = t.cells[p]
    return CayleyTable(t.order, tuple(tuple(prow[v] for v in row) for row in t.cells))


def property_flags(t) -> PropertyFlags:
    t = _coerce(t)
    return PropertyFlags(
        medial=is_medial(t),
        idempotent=is_idempotent(t),
        unipotent=is_unipotent(t) is not None,
        associative=is_associative(t),
    )


def system_flags(s: TripleSystem) -> PropertyFlags:
    """Property flags of a triple system; the table is built only for the O(n^4) checks."""
    n = s.order
    idem = all(s.diag[x] == x for x in range(n))
    uni = len(set(s.diag)) == 1
    t = from_triples(s)
    return PropertyFlags(medial=is_medial(t), idempotent=idem, unipotent=uni, associative=is_associative(t))


def xor_table(k: int) -> CayleyTable:
    """Elementary abelian 2-group of order 2**k."""
    n = 1 << k
    return CayleyTable.from_rows([[x ^ y for y in range(n)] for x in range(n)])


# -- text format ---------------------------------------------------------------

def parse_table(text: str) -> CayleyTable:
    """Parse ``n`` followed by ``n`` rows of ``n`` decimal symbols."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise StructureError("missing order line", line=1)
    head = lines[0].split()
    if len(head) != 1:
        raise StructureError("first line must hold only the order", line=1)
    try:
        n = int(head[0])
    except ValueError:
        raise StructureError(f"order {head[0]!r} is not an integer", line=1, column=1) from None
    if n < 1:
        raise StructureError("order must be positive", line=1, column=1)
    if len(lines) < n + 1:
        raise StructureError(f"expected {n} rows, found {len(lines) - 1}", line=len(lines) + 1)
    rows = []
    for r in range(n):
        lineno = r + 2
        tokens = lines[r + 1].split()
        if len(tokens) != n:
            raise StructureError(f"expected {n} symbols, found {len(tokens)}", line=lineno)
        row = []
        for col, tok in enumerate(tokens, start=1):
            try:
                v = int(tok)
            except ValueError:
                raise StructureError(f"{tok!r} is not an integer", line=lineno, column=col) from None
            if not 0 <= v < n:
                raise StructureError(f"symbol {v} outside 0..{n - 1}", line=lineno, column=col)
            row.append(v)
        rows.append(row)
    for extra, line in enumerate(lines[n + 1:], start=n + 2):
        if line.strip():
            raise StructureError("trailing content after table", line=extra)
    return CayleyTable.from_rows(rows)


def format_table(t: CayleyTable) -> str:
    out = [str(t.order)]
    out.extend(" ".join(str(v) for v in row) for row in t.cells)
    return "\n".join(out) + "\n"
