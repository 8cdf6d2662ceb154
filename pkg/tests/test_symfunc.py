from math import factorial

import pytest
from hypothesis import given, strategies as st

from oracles import character_by_permutation_matrix_21, quotient_trace, standard_tableaux_count
from picodim.algebra import build_W
from picodim.codim import codim
from picodim.freepoly import enumerate_monomials, evaluate_monomial
from picodim.phi import necessary_ok, sufficient_ok
from picodim.symfunc import (KlmtDecomposition, MultiplicityError, class_representative,
                             class_size, colength, colength_bound, conjugate, cycle_type,
                             decompose_character, decompose_klmt, hook_degree, lemma4_failures,
                             lemma4_witness, mn_character, multiplicities, partitions,
                             quotient_character)

W = build_W()

# regression goldens, computed once by the rank/trace route and cross-checked below
GOLDEN_M = {
    1: {(1,): 1},
    2: {(2,): 1, (1, 1): 1},
    3: {(3,): 2, (2, 1): 4, (1, 1, 1): 1},
    4: {(4,): 5, (3, 1): 11, (2, 2): 6, (2, 1, 1): 5},
    5: {(5,): 10, (4, 1): 21, (3, 2): 19, (3, 1, 1): 13, (2, 2, 1): 8, (2, 1, 1, 1): 1},
}


@pytest.fixture(scope="module")
def decs():
    return {n: multiplicities(W, n) for n in range(1, 6)}


def test_partitions_counts():
    assert [len(list(partitions(n))) for n in range(1, 11)] == [1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    assert list(partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert all(len(l) <= 2 for l in partitions(7, max_len=2))


def test_hook_degree_examples():
    assert hook_degree((5,)) == 1
    assert hook_degree((1, 1, 1)) == 1
    assert hook_degree((3, 1, 1, 1)) == 10


@pytest.mark.parametrize("n", range(1, 9))
def test_hook_degree_counts_tableaux(n):
    for lam in partitions(n):
        assert hook_degree(lam) == standard_tableaux_count(lam)


@pytest.mark.parametrize("n", range(1, 13))
def test_degree_squares(n):
    assert sum(hook_degree(l) ** 2 for l in partitions(n)) == factorial(n)


def test_character_examples():
    for cls in partitions(5):
        assert mn_character((5,), cls) == 1
        sign = (-1) ** (5 - len(cls))
        assert mn_character((1,) * 5, cls) == sign
    assert mn_character((2, 1), (3,)) == -1
    for cls in partitions(3):
        assert mn_character((2, 1), cls) == character_by_permutation_matrix_21(cls)
    with pytest.raises(ValueError):
        mn_character((2, 1), (2,))


@pytest.mark.parametrize("n", range(1, 8))
def test_orthogonality(n):
    parts = list(partitions(n))
    for lam in parts:
        assert mn_character(lam, (1,) * n) == hook_degree(lam)
        for mu in parts:
            s = sum(class_size(c) * mn_character(lam, c) * mn_character(mu, c) for c in parts)
            assert s == (factorial(n) if lam == mu else 0)


@given(st.sampled_from([l for n in range(1, 9) for l in partitions(n)]))
def test_conjugate_twists_by_sign(lam):
    n = sum(lam)
    assert conjugate(conjugate(lam)) == lam
    for cls in partitions(n):
        assert mn_character(conjugate(lam), cls) == (-1) ** (n - len(cls)) * mn_character(lam, cls)


def test_class_representatives():
    for n in range(1, 7):
        assert sum(class_size(c) for c in partitions(n)) == factorial(n)
        for c in partitions(n):
            assert cycle_type(class_representative(c)) == c


def test_quotient_character_small():
    assert quotient_character(W, 1, 2**31 - 1) == {(1,): 1}
    assert quotient_character(W, 2, 2**31 - 1) == {(2,): 0, (1, 1): 2}


def test_quotient_character_against_monomial_action():
    monos = enumerate_monomials(3)
    chi = quotient_character(W, 3, 2**31 - 1)
    for cls in partitions(3):
        assert chi[cls] == quotient_trace(W, 3, class_representative(cls), monos, evaluate_monomial)
    chi4 = quotient_character(W, 4, 2**31 - 19)
    sigma = class_representative((2, 2))
    assert chi4[(2, 2)] == quotient_trace(W, 4, sigma, enumerate_monomials(4), evaluate_monomial)


def test_multiplicities_goldens(decs):
    for n, dec in decs.items():
        assert dec.nonzero() == GOLDEN_M[n]
        assert all(m >= 0 for m in dec.mult.values())


def test_degree_sum_equals_codimension(decs):
    for n, dec in decs.items():
        assert dec.degree_sum() == codim(W, n).c_n
        assert dec.character[(1,) * n] == codim(W, n).c_n


def test_nonzero_multiplicities_satisfy_necessary_condition(decs):
    for dec in decs.values():
        for lam in dec.nonzero():
            assert necessary_ok(lam), lam


def test_sufficient_condition_gives_nonzero(decs):
    checked = 0
    for n, dec in decs.items():
        for lam in partitions(n, max_len=4):
            if sufficient_ok(lam):
                checked += 1
                assert dec.mult[lam] >= 1, lam
                _, rep = lemma4_witness(decompose_klmt(lam))
                assert rep["nonzero"] and rep["e0_is_unit"] and rep["degree_matches"]
    assert checked > 0


def test_colength(decs):
    assert colength(decs[1]) == 1
    assert colength(decs[2]) == 2
    assert colength_bound(4, 2) == 4 * 3 ** 20
    for n, dec in decs.items():
        assert colength(dec) <= colength_bound(4, n)


def test_bad_character_is_rejected():
    with pytest.raises(MultiplicityError):
        decompose_character({(2,): 1, (1, 1): 2}, 2)


def test_klmt_examples():
    assert decompose_klmt((3, 1, 1, 1)) == KlmtDecomposition(1, 0, 0, 2)
    assert decompose_klmt((7, 5, 3, 1)) == KlmtDecomposition(1, 2, 2, 2)
    assert decompose_klmt((2, 2, 2)) == KlmtDecomposition(0, 2, 0, 0)
    with pytest.raises(ValueError):
        decompose_klmt((1, 1, 1, 1, 1))


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4), st.integers(0, 4))
def test_klmt_round_trip(k, l, m, t):
    dec = KlmtDecomposition(k, l, m, t)
    if dec.n == 0:
        return
    assert decompose_klmt(dec.partition) == dec
    assert sum(dec.partition) == dec.n


def test_witness_examples():
    e0 = W.basis(1)
    v, _ = lemma4_witness(KlmtDecomposition(1, 0, 2, 0))
    assert v == -e0
    v, _ = lemma4_witness(KlmtDecomposition(1, 1, 2, 0))
    assert v == e0
    v, rep = lemma4_witness(KlmtDecomposition(0, 2, 0, 1))
    assert rep["e0_is_unit"] and rep["degree_matches"]
    assert set(rep["remainder_grades"]) <= {-1, 1, 2}


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 6), st.integers(0, 6))
def test_witness_whenever_hypotheses_hold(k, l, m, t):
    dec = KlmtDecomposition(k, l, m, t)
    if lemma4_failures(dec) or dec.n == 0:
        return
    _, rep = lemma4_witness(dec)
    assert rep["e0_is_unit"] and rep["degree_matches"] and rep["nonzero"]


def test_witness_refuses_bad_input():
    with pytest.raises(ValueError, match="m <= 2k"):
        lemma4_witness(KlmtDecomposition(1, 0, 3, 0))
    with pytest.raises(ValueError, match="m\\+t >= 2k"):
        lemma4_witness(KlmtDecomposition(2, 0, 1, 0))
