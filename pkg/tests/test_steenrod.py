from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from steenrod_ext.steenrod import (
    coproduct_monomial,
    degree,
    format_sq,
    format_xi,
    get_slice,
    in_a_mod_a,
    in_quotient,
    parse_sq,
    parse_xi,
    xi_antipode,
    xi_coproduct,
)


def product_sum(sl, a, b):
    acc = set()
    for x in a:
        for y in b:
            for t in sl.product(x, y):
                acc ^= {t}
    return acc


def test_basis_sizes():
    assert len(get_slice("A0").all_elements()) == 2
    assert len(get_slice("A1").all_elements()) == 8
    assert len(get_slice("A2").all_elements()) == 64
    # partitions into parts 1, 3, 7
    assert [get_slice("A", 20).dim(d) for d in range(10)] == [1, 1, 1, 2, 2, 2, 3, 4, 4, 5]


def test_slice_spelling_and_sharing():
    assert get_slice("A(2)") is get_slice("A2")
    with pytest.raises(ValueError):
        get_slice("A")
    with pytest.raises(ValueError):
        get_slice("B3")


def test_low_degree_products():
    # Sq(R) is dual to the conjugate monomial, so it is chi of Milnor's Sq(R):
    # Sq1 Sq2 = Sq^3 = chi(Sq(3)) + chi(Sq(0,1)) and Sq2 Sq1 = chi(Sq1 Sq2)
    a2 = get_slice("A2")
    assert a2.product((1,), (1,)) == ()
    assert set(a2.product((1,), (2,))) == {(3,), (0, 1)}
    assert a2.product((2,), (1,)) == ((3,),)
    assert a2.product((2,), (2,)) == ((1, 1),)


def test_product_outside_slice_raises():
    with pytest.raises(ValueError):
        get_slice("A1").product((4,), (1,))
    with pytest.raises(ValueError):
        get_slice("A", 10).product((8,), (4,))


def test_associativity_exhaustive_a1():
    a1 = get_slice("A1")
    els = a1.all_elements()
    for a in els:
        for b in els:
            for c in els:
                assert product_sum(a1, a1.product(a, b), [c]) == product_sum(a1, [a], a1.product(b, c))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_associativity_truncated_a(seed):
    sl = get_slice("A", 24)
    rng = random.Random(seed)
    d1, d2 = rng.randint(0, 12), rng.randint(0, 12)
    d3 = rng.randint(0, 24 - d1 - d2)
    a, b, c = (rng.choice(sl.basis(d)) for d in (d1, d2, d3))
    assert product_sum(sl, sl.product(a, b), [c]) == product_sum(sl, [a], sl.product(b, c))


def test_conjugate_is_an_antipode():
    a2 = get_slice("A2")
    for r in a2.all_elements():
        if r == ():
            continue
        acc = set()
        for x, y in a2.coproduct(r):
            acc ^= product_sum(a2, a2.conjugate(x), [y])
        assert not acc, format_sq(r)
        # chi is an involution
        assert product_sum(a2, [()], [()]) == {()}
        twice = set()
        for c in a2.conjugate(r):
            twice ^= set(a2.conjugate(c))
        assert twice == {r}


def test_xi_coproduct_low():
    assert set(xi_coproduct((0, 1))) == {((0, 1), ()), ((1,), (2,)), ((), (0, 1))}
    assert set(xi_antipode((0, 1))) == {(0, 1), (3,)}


def test_coproduct_monomial_in_quotient():
    terms = set(coproduct_monomial((4, 2), "A//A(1)"))
    assert terms == {((), (4, 2)), ((4, 2), ()), ((4,), (0, 2)), ((0, 2), (4,)), ((6,), (4,)), ((2,), (8,))}
    with pytest.raises(ValueError):
        coproduct_monomial((1,), "A//A(1)")
    with pytest.raises(ValueError):
        coproduct_monomial((1,), "A//B")


def test_membership_predicates():
    assert in_a_mod_a((4, 2), 1) and not in_a_mod_a((2, 2), 1)
    assert in_a_mod_a((1, 1), -1)
    assert in_quotient((3, 1), 1) and not in_quotient((4,), 1)


def test_parse_and_format():
    assert parse_sq("Sq(1, 2)") == (1, 2)
    assert format_sq((1, 2)) == "Sq(1,2)"
    assert parse_xi("xi2^3") == (0, 3)
    assert format_xi((0, 3)) == "xi2^3"
    assert degree((1, 2)) == 7


def test_generator_basis_inverts():
    import numpy as np

    a2 = get_slice("A2")
    for d in range(0, 24):
        _, to_m, from_m = a2.generator_basis(d)
        assert np.array_equal((to_m.astype(int) @ from_m) % 2, np.eye(a2.dim(d), dtype=int))
