from __future__ import annotations

import math
from itertools import permutations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsq import diagonal as dg


def commuting_perms(d) -> int:
    n = len(d)
    return sum(1 for p in permutations(range(n)) if all(p[d[x]] == d[p[x]] for x in range(n)))


def relabel_map(d, perm):
    out = [0] * len(d)
    for x, y in enumerate(d):
        out[perm[x]] = perm[y]
    return tuple(out)


def test_admissible_idempotent_counts_examples():
    assert dg.admissible_idempotent_counts(16) == [1, 4, 7]
    assert dg.admissible_idempotent_counts(3) == [0, 3]
    assert dg.admissible_idempotent_counts(1) == [1]


@pytest.mark.parametrize("n", range(1, 8))
def test_admissible_idempotent_counts_match_exhaustion(n):
    seen = {sum(1 for x, y in enumerate(d) if x == y) for d in product(range(n), repeat=n) if dg.is_admissible(d)}
    assert dg.admissible_idempotent_counts(n) == sorted(seen)


def test_order_3_classes():
    classes = dg.generate_diagonal_classes(3)
    assert [(c.idempotents, c.aut_order, c.labeled_count) for c in classes] == [(0, 3, 2), (3, 6, 1)]


def test_order_2_single_class():
    (c,) = dg.generate_diagonal_classes(2)
    assert c.labeled_count == 2 and c.idempotents == 1
    assert not dg.is_admissible((0, 1))


def test_order_16_split():
    classes = dg.generate_diagonal_classes(16)
    assert len(classes) == 980
    assert dg.count_by_idempotents(classes) == {1: 901, 4: 77, 7: 2}


def test_canonical_form_examples():
    assert dg.diagonal_canonical_form((0, 1, 2)) == dg.diagonal_canonical_form(relabel_map((0, 1, 2), (2, 0, 1)))
    assert dg.diagonal_canonical_form((1, 2, 0)) == dg.diagonal_canonical_form((2, 0, 1))
    assert dg.diagonal_canonical_form((0, 1, 2)) != dg.diagonal_canonical_form((1, 2, 0))


def test_two_cycle_and_parity_checks():
    assert dg.has_two_cycle((1, 0, 2))
    assert dg.tail_degrees((1, 2, 0)) == [2, 2, 2]
    assert not dg.is_admissible((0, 0, 0))  # tail degrees 2, 1, 1 at n = 3


@pytest.mark.parametrize("n", range(1, 7))
def test_generation_matches_bruteforce(n):
    classes = dg.generate_diagonal_classes(n)
    brute = dg.bruteforce_diagonal_classes(n)
    assert {c.key: c.labeled_count for c in classes} == brute
    assert len({c.key for c in classes}) == len(classes)


@pytest.mark.parametrize("n", range(1, 8))
def test_aut_order_matches_permutation_search(n):
    for c in dg.generate_diagonal_classes(n):
        assert c.aut_order == commuting_perms(c.rep)


@pytest.mark.parametrize("n", [*range(1, 13), 16])
def test_class_invariants(n):
    allowed = set(dg.admissible_idempotent_counts(n))
    classes = dg.generate_diagonal_classes(n)
    for c in classes:
        assert dg.is_admissible(c.rep)
        assert c.idempotents in allowed
        assert c.aut_order * c.labeled_count == math.factorial(n)
        assert dg.diagonal_canonical_form(c.rep) == c.key
        assert dg.automorphism_order(c.rep) == c.aut_order
    assert classes == sorted(classes, key=lambda c: (c.idempotents, c.key))


def test_class_line_format():
    c = dg.generate_diagonal_classes(3)[0]
    assert c.line() == f"i=0 aut=3 labeled=2 d={','.join(map(str, c.rep))}"


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_canonical_form_relabel_invariant(data):
    n = data.draw(st.integers(1, 12))
    classes = dg.generate_diagonal_classes(n)
    c = classes[data.draw(st.integers(0, len(classes) - 1))]
    perm = data.draw(st.permutations(range(n)))
    moved = relabel_map(c.rep, perm)
    assert dg.is_admissible(moved)
    assert dg.diagonal_canonical_form(moved) == c.key
    assert dg.automorphism_order(moved) == c.aut_order


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 7).flatmap(lambda n: st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))
def test_random_maps_canonical_and_aut(d):
    if dg.has_two_cycle(d):
        return
    key = dg.diagonal_canonical_form(d)
    assert dg.diagonal_canonical_form(key[1:]) == key
    assert dg.automorphism_order(d) == commuting_perms(d)
