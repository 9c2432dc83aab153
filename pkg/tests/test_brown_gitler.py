from __future__ import annotations

import pytest

from steenrod_ext.brown_gitler import (
    admissible_monomials,
    phi_isomorphism,
    dump_tsv,
    even_sequence,
    lambda_a2_a1,
    m_comodule,
    n_comodule,
    odd_sequence,
    phi_check,
    tau_filtration,
    tau_split,
    verify_splitting,
)
from steenrod_ext.steenrod import degree, get_slice, weight


def series(i: int, d_max: int) -> list[int]:
    """Poincare series of (A//A(i))_*: xi_k^(2^(i+2-k)) generates for k <= i+1."""
    coeffs = [1] + [0] * d_max
    k = 1
    while (1 << k) - 1 <= d_max:
        step = ((1 << k) - 1) * ((1 << (i + 2 - k)) if k <= i + 1 else 1)
        for d in range(step, d_max + 1):
            coeffs[d] += coeffs[d - step]
        k += 1
    return coeffs


@pytest.mark.parametrize("i", [-1, 0, 1, 2])
def test_admissible_counts(i):
    monos = admissible_monomials(i, 30)
    by_deg = [0] * 31
    for m in monos:
        by_deg[degree(m)] += 1
    assert by_deg == series(i, 30)


def test_full_dual_matches_algebra_dims():
    sl = get_slice("A", 20)
    assert len(admissible_monomials(-1, 20)) == sum(sl.dim(d) for d in range(21))


def test_n11_basis():
    n = n_comodule(1, 1)
    assert n.monomials == ((), (4,), (0, 2), (0, 0, 1))
    assert n.degrees == (0, 4, 6, 7)
    assert dump_tsv(n).splitlines()[1:] == ["1\t0\t0", "xi1^4\t4\t4", "xi2^2\t6\t4", "xi3^1\t7\t4"]


def test_weights_of_m_and_n():
    for j in range(4):
        assert all(weight(m) == 4 * j for m in m_comodule(1, j).monomials)
        assert all(weight(m) <= 4 * j for m in n_comodule(1, j).monomials)
    assert [n_comodule(1, j).dim for j in range(5)] == [1, 4, 11, 24, 47]
    with pytest.raises(ValueError):
        n_comodule(1, -1)


def test_coactions_are_coassociative():
    for bg in (n_comodule(1, 2), m_comodule(2, 1), lambda_a2_a1()):
        bg.comodule.check()


def test_phi_commutes_with_coaction():
    assert phi_check(1, 24) == []
    assert phi_check(2, 24) == []


def test_m21_isomorphism():
    f, rep = phi_isomorphism(2, 1)
    assert rep.ok, rep.messages
    assert rep.shift == 8
    assert m_comodule(2, 1).degrees == (8, 12, 14, 15)


def test_splitting_small():
    assert verify_splitting(1, 16).ok
    assert verify_splitting(2, 16).ok


def test_tau_split_and_filtration():
    assert tau_split((12, 6, 1)) == ((8, 4), (4, 2, 1))
    assert tau_filtration((12, 6, 1)) == 2  # weight of xi1^8 xi2^4 is 16
    with pytest.raises(ValueError):
        tau_split((1,))


@pytest.mark.parametrize("j", [1, 2])
def test_exact_sequences(j):
    odd = odd_sequence(j)
    even = even_sequence(j)
    assert odd.ok, odd.failures
    assert even.ok, even.failures
    assert odd.alternating_sum() == 0
    assert even.alternating_sum() == 0
    if j == 1:
        assert odd.dims() == [16, 24, 8]
        assert even.dims() == [4, 11, 8, 1]
