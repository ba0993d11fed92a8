from __future__ import annotations

import math
import random
from itertools import product

import pytest

from conftest import PUBLISHED, idempotent_labeled
from tsq import core
from tsq.core import TripleSystem
from tsq.crosscheck import (
    AbelianType,
    abelian_aut_order,
    abelian_group_count,
    abelian_types,
    p_group_aut_order,
    partitions,
    schwenk_medial_classes,
    theorem2_collapse,
    theorem2_expand,
    young_medial_labeled,
)
from tsq.errors import DomainError, RefusalError

STS3 = TripleSystem(3, (0, 1, 2), ((0, 1, 2),))


def brute_aut_order(cyclic_orders: list[int]) -> int:
    """Count automorphisms of Z_m1 x ... x Z_mk by images of the generators."""
    elems = list(product(*(range(m) for m in cyclic_orders)))
    k = len(cyclic_orders)

    def add(a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, cyclic_orders))

    def scale(c, a):
        out = tuple(0 for _ in cyclic_orders)
        for _ in range(c):
            out = add(out, a)
        return out

    count = 0
    zero = tuple(0 for _ in cyclic_orders)
    for images in product(elems, repeat=k):
        if any(scale(m, img) != zero for m, img in zip(cyclic_orders, images)):
            continue
        seen = set()
        for e in elems:
            v = zero
            for c, img in zip(e, images):
                v = add(v, scale(c, img))
            seen.add(v)
        count += len(seen) == len(elems)
    return count


def test_young_examples():
    assert young_medial_labeled(8) == 15_360
    assert young_medial_labeled(4) == 16
    assert young_medial_labeled(16) == 4_250_979_532_800


def test_schwenk_examples():
    assert schwenk_medial_classes(16) == 5
    assert schwenk_medial_classes(9) == 4
    assert schwenk_medial_classes(12) == 4
    with pytest.raises(RefusalError):
        schwenk_medial_classes(17)


@pytest.mark.parametrize("n", range(1, 17))
def test_oracles_match_published_medial_columns(n):
    assert young_medial_labeled(n) == PUBLISHED[n][2]
    assert schwenk_medial_classes(n) == PUBLISHED[n][3]


@pytest.mark.parametrize("n", range(1, 33))
def test_aut_orders_match_brute_force(n):
    for g in abelian_types(n):
        if n <= 16:
            assert abelian_aut_order(g) == brute_aut_order(g.cyclic_orders())
        assert math.factorial(n) % abelian_aut_order(g) == 0


def test_p_group_formula_known_values():
    assert p_group_aut_order(2, (1, 1)) == 6
    assert p_group_aut_order(2, (1, 1, 1)) == 168
    assert p_group_aut_order(2, (2, 1)) == 8
    assert p_group_aut_order(3, (1,)) == 2
    assert p_group_aut_order(2, (1, 1, 1, 1)) == 20160


def test_partitions_and_group_counts():
    assert [len(partitions(e)) for e in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]
    assert [abelian_group_count(n) for n in (1, 8, 12, 16, 36, 72)] == [1, 3, 2, 5, 4, 6]
    with pytest.raises(ValueError):
        AbelianType(6, ((2, 1),))


def test_expand_sts3_gives_all_order_4_unipotents():
    out = {theorem2_expand(STS3, slot) for slot in range(4)}
    assert len(out) == 4
    for q in out:
        t = core.from_triples(q)
        assert core.is_unipotent(t) is not None and core.is_totally_symmetric(t)
        assert theorem2_collapse(q) == STS3


def test_expand_order_7_gives_240():
    out = set()
    for q in idempotent_labeled(7):
        for slot in range(8):
            big = theorem2_expand(q, slot)
            assert theorem2_collapse(big) == q
            out.add(big)
    assert len(out) == 240


@pytest.mark.parametrize("n", [1, 3, 7, 9])
def test_round_trip_and_fibers(n):
    fibers = {}
    for q in idempotent_labeled(n):
        for slot in range(n + 1):
            big = theorem2_expand(q, slot)
            back = theorem2_collapse(big)
            assert back == q
            fibers[back] = fibers.get(back, 0) + 1
            if n <= 7:
                assert core.is_totally_symmetric(core.from_triples(big))
    assert set(fibers.values()) <= {n + 1}
    assert len(fibers) == PUBLISHED[n][4]


def test_collapse_of_every_order_4_unipotent():
    for k in range(4):
        rest = tuple(x for x in range(4) if x != k)
        assert theorem2_collapse(TripleSystem(4, (k,) * 4, (rest,))) == STS3


def test_domain_errors():
    with pytest.raises(DomainError):
        theorem2_expand(TripleSystem(3, (1, 2, 0), ()), 0)
    with pytest.raises(DomainError):
        theorem2_expand(STS3, 4)
    with pytest.raises(DomainError):
        theorem2_collapse(STS3)


def test_collapse_output_is_idempotent_ts():
    rng = random.Random(5)
    for q in idempotent_labeled(9)[:50]:
        perm = list(range(10))
        rng.shuffle(perm)
        # relabeling keeps the system unipotent, so collapse must still apply
        big = theorem2_expand(q, rng.randrange(10)).relabel(perm)
        t = core.from_triples(theorem2_collapse(big))
        assert core.is_idempotent(t) and core.is_totally_symmetric(t)
