"""Independent oracles: idempotent/unipotent bijection and abelian-group counts."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .core import TripleSystem
from .errors import DomainError, RefusalError


def _transposition(n: int, a: int, b: int) -> list[int]:
    perm = list(range(n))
    perm[a], perm[b] = b, a
    return perm


def theorem2_expand(q: TripleSystem, slot: int) -> TripleSystem:
    """Unipotent system of order n+1 with constant diagonal value ``slot``.

    A new element ``a = n`` is adjoined with ``x*x = a`` for every x (so
    ``x*a = a*x = x``) and ``a*a = a``; products of distinct old elements are
    kept.  The transposition ``(slot a)`` then moves the diagonal value.
    """
    n = q.order
    if any(q.diag[x] != x for x in range(n)):
        raise DomainError("expansion needs an idempotent system")
    if not 0 <= slot <= n:
        raise DomainError(f"slot {slot} outside 0..{n}")
    a = n
    expanded = TripleSystem.unchecked(n + 1, tuple([a] * (n + 1)), q.triples)
    return expanded.relabel(_transposition(n + 1, slot, a))


def theorem2_collapse(q: TripleSystem) -> TripleSystem:
    """Idempotent system of order n from a unipotent one of order n+1."""
    m = q.order
    k = q.diag[0]
    if any(v != k for v in q.diag):
        raise DomainError("collapse needs a unipotent system")
    if m < 2:
        raise DomainError("collapse needs order at least 2")
    a = m - 1
    moved = q.relabel(_transposition(m, k, a))
    # every pair {x, a} is a tail edge, so no block contains a
    return TripleSystem(m - 1, tuple(range(m - 1)), moved.triples)


# -- abelian groups ----------------------------------------------------------------

def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def partitions(e: int, largest: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of e as non-increasing tuples."""
    if largest is None:
        largest = e
    if e == 0:
        return [()]
    out = []
    for first in range(min(e, largest), 0, -1):
        out.extend((first,) + rest for rest in partitions(e - first, first))
    return out


@dataclass(frozen=True)
class AbelianType:
    order: int
    factors: tuple[tuple[int, int], ...]  # (p, e): one cyclic factor of order p**e each

    def __post_init__(self):
        if math.prod(p**e for p, e in self.factors) != self.order:
            raise ValueError("prime powers do not multiply to the order")

    def cyclic_orders(self) -> list[int]:
        return [p**e for p, e in self.factors]


def abelian_types(n: int) -> list[AbelianType]:
    primes = sorted(factorize(n).items())
    out = []
    for choice in product(*(partitions(e) for _, e in primes)):
        factors = tuple((p, part) for (p, _), lam in zip(primes, choice) for part in lam)
        out.append(AbelianType(n, factors))
    return out


def p_group_aut_order(p: int, lam: tuple[int, ...]) -> int:
    """|Aut| of the abelian p-group with exponent partition ``lam``."""
    e = sorted(lam)
    m = len(e)
    # d_k = largest index with e_l == e_k, c_k = smallest (1-based)
    d = [max(l for l in range(1, m + 1) if e[l - 1] == e[k]) for k in range(m)]
    c = [min(l for l in range(1, m + 1) if e[l - 1] == e[k]) for k in range(m)]
    total = 1
    for k in range(1, m + 1):
        total *= p ** d[k - 1] - p ** (k - 1)
    for j in range(m):
        total *= p ** (e[j] * (m - d[j]))
    for i in range(m):
        total *= p ** ((e[i] - 1) * (m - c[i] + 1))
    return total


def abelian_aut_order(g: AbelianType) -> int:
    by_prime: dict[int, list[int]] = {}
    for p, e in g.factors:
        by_prime.setdefault(p, []).append(e)
    return math.prod(p_group_aut_order(p, tuple(es)) for p, es in by_prime.items())


def abelian_group_count(n: int) -> int:
    return math.prod(len(partitions(e)) for e in factorize(n).values())


def young_medial_labeled(n: int) -> int:
    """Labeled abelian groups of order n: sum of n!/|Aut(G)|."""
    if n < 1:
        raise ValueError("order must be positive")
    f = math.factorial(n)
    return sum(f // abelian_aut_order(g) for g in abelian_types(n))


def schwenk_medial_classes(n: int) -> int:
    """Medial class count, using the simplification valid for n <= 16."""
    if n < 1:
        raise ValueError("order must be positive")
    if n > 16:
        raise RefusalError("the simplified class-count rule is only asserted for n <= 16")
    count = abelian_group_count(n)
    return 2 * count if n % 3 == 0 else count
