"""Triangle partitions of the residual pair graph.

For a fixed diagonal map the remaining unordered pairs (everything except
the tail edges ``{x, d[x]}``) must be split into triangles; each split is one
totally symmetric quasigroup with that diagonal.  The search always extends
the lexicographically smallest uncovered pair ``(x, y)`` and tries third
vertices from ``adj[x] & adj[y]`` in ascending order, so the visit order is
deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .core import Triple
from .errors import DomainError

Visitor = Callable[[tuple[Triple, ...]], object]


def residual_adjacency(n: int, d: Sequence[int]) -> list[int]:
    """Per-vertex neighbor bitsets of K_n minus the tail edges of ``d``."""
    if len(d) != n:
        raise DomainError(f"diagonal has length {len(d)}, expected {n}")
    full = (1 << n) - 1
    adj = [full & ~(1 << v) for v in range(n)]
    for x, y in enumerate(d):
        if x != y:
            if d[y] == x:
                raise DomainError(f"diagonal has a 2-cycle on {{{x}, {y}}}")
            adj[x] &= ~(1 << y)
            adj[y] &= ~(1 << x)
    return adj


def _check_residual(adj: list[int]) -> bool:
    edges = sum(a.bit_count() for a in adj) // 2
    if edges % 3:
        return False
    return all(a.bit_count() % 2 == 0 for a in adj)


def _lowest(bits: int) -> int:
    return (bits & -bits).bit_length() - 1


def _remove_triangle(adj: list[int], x: int, y: int, z: int) -> None:
    adj[x] &= ~((1 << y) | (1 << z))
    adj[y] &= ~((1 << x) | (1 << z))
    adj[z] &= ~((1 << x) | (1 << y))


def _restore_triangle(adj: list[int], x: int, y: int, z: int) -> None:
    adj[x] |= (1 << y) | (1 << z)
    adj[y] |= (1 << x) | (1 << z)
    adj[z] |= (1 << x) | (1 << y)


def _first_pair(adj: list[int], start: int) -> tuple[int, int] | None:
    for x in range(start, len(adj)):
        if adj[x]:
            return x, _lowest(adj[x])
    return None


def _count(adj: list[int], start: int, memo: dict) -> int:
    pair = _first_pair(adj, start)
    if pair is None:
        return 1
    x, y = pair
    state = tuple(adj[x:])
    hit = memo.get(state)
    if hit is not None:
        return hit
    cand = adj[x] & adj[y]
    total = 0
    while cand:
        low = cand & -cand
        z = low.bit_length() - 1
        cand ^= low
        _remove_triangle(adj, x, y, z)
        total += _count(adj, x, memo)
        _restore_triangle(adj, x, y, z)
    memo[state] = total
    return total


def count_triangle_partitions(n: int, d: Sequence[int]) -> int:
    adj = residual_adjacency(n, d)
    if not _check_residual(adj):
        return 0
    return _count(adj, 0, {})


def _walk(adj: list[int], start: int, chosen: list[Triple]) -> Iterator[tuple[Triple, ...]]:
    pair = _first_pair(adj, start)
    if pair is None:
        yield tuple(sorted(chosen))
        return
    x, y = pair
    cand = adj[x] & adj[y]
    while cand:
        low = cand & -cand
        z = low.bit_length() - 1
        cand ^= low
        _remove_triangle(adj, x, y, z)
        chosen.append((x, y, z))
        yield from _walk(adj, x, chosen)
        chosen.pop()
        _restore_triangle(adj, x, y, z)


def iter_triangle_partitions(n: int, d: Sequence[int], prefix: Sequence[Triple] = ()) -> Iterator[tuple[Triple, ...]]:
    """Yield each partition as a sorted tuple of sorted triples.

    ``prefix`` restricts the search to the subtree reached by choosing those
    triangles first (as produced by ``split_work``).
    """
    adj = residual_adjacency(n, d)
    if not _check_residual(adj):
        return
    chosen = []
    for t in prefix:
        a, b, c = t
        mask_ok = (adj[a] >> b) & (adj[a] >> c) & (adj[b] >> c) & 1
        if not mask_ok:
            raise DomainError(f"prefix triangle {t} is not available")
        _remove_triangle(adj, a, b, c)
        chosen.append(tuple(sorted(t)))
    yield from _walk(adj, 0, chosen)


def enumerate_triangle_partitions(n: int, d: Sequence[int], visitor: Visitor, prefix: Sequence[Triple] = ()) -> int:
    """Call ``visitor`` once per partition; returns the number of visits.

    An exception raised by the visitor aborts the enumeration.
    """
    visits = 0
    for part in iter_triangle_partitions(n, d, prefix):
        visitor(part)
        visits += 1
    return visits


# -- work splitting ----------------------------------------------------------

@dataclass(frozen=True)
class SubJob:
    order: int
    diag: tuple[int, ...]
    prefix: tuple[Triple, ...]

    def to_line(self) -> str:
        pre = "|".join("-".join(str(v) for v in t) for t in self.prefix)
        return f"{self.order} {','.join(str(v) for v in self.diag)} {pre or '-'}"

    @classmethod
    def from_line(cls, line: str) -> SubJob:
        parts = line.split()
        if len(parts) != 3:
            raise DomainError(f"malformed checkpoint record: {line!r}")
        n = int(parts[0])
        diag = tuple(int(v) for v in parts[1].split(","))
        prefix: tuple[Triple, ...] = ()
        if parts[2] != "-":
            prefix = tuple(tuple(int(v) for v in t.split("-")) for t in parts[2].split("|"))
            if any(len(t) != 3 for t in prefix):
                raise DomainError(f"malformed prefix in checkpoint record: {line!r}")
        if len(diag) != n:
            raise DomainError(f"diagonal length mismatch in checkpoint record: {line!r}")
        return cls(n, diag, prefix)

    def run(self, visitor: Visitor) -> int:
        return enumerate_triangle_partitions(self.order, self.diag, visitor, self.prefix)


def split_work(n: int, d: Sequence[int], depth: int = 2) -> list[SubJob]:
    """Cut the search tree after ``depth`` triangle choices.

    A partition completed above the cut becomes a sub-job whose prefix is
    the whole partition; branches that die above the cut produce no job.
    """
    d = tuple(d)
    adj = residual_adjacency(n, d)
    if not _check_residual(adj):
        return []
    jobs: list[SubJob] = []
    chosen: list[Triple] = []

    def descend(start: int):
        pair = _first_pair(adj, start)
        if pair is None or len(chosen) == depth:
            jobs.append(SubJob(n, d, tuple(chosen)))
            return
        x, y = pair
        cand = adj[x] & adj[y]
        while cand:
            low = cand & -cand
            z = low.bit_length() - 1
            cand ^= low
            _remove_triangle(adj, x, y, z)
            chosen.append((x, y, z))
            descend(x)
            chosen.pop()
            _restore_triangle(adj, x, y, z)

    descend(0)
    return jobs
