from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from picodim.algebra import (P1, P2, AlgebraSpec, Element, Residue, SchemaError, algebra_from_json,
                             build_W, check_grading, check_simple, check_unit, direct_sum,
                             multiplication_algebra_dim, multiply, to_residue)

W = build_W()
EM1, E0, E1, E2 = (W.basis(i) for i in range(4))
ZERO = Element.zero(4)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
elements = st.lists(fractions, min_size=4, max_size=4).map(lambda c: Element(tuple(c)))


def test_products_from_rules():
    assert multiply(W, EM1, E1) == E0
    assert multiply(W, E1, EM1) == ZERO
    assert multiply(W, E0, E0) == E0
    assert multiply(W, E1, E1) == E2
    assert multiply(W, EM1, EM1) == ZERO
    assert multiply(W, E2, E0) == E2


def test_full_table_rows():
    rows = {
        0: (ZERO, EM1, E0, E1),
        1: (EM1, E0, E1, E2),
        2: (ZERO, E1, E2, ZERO),
        3: (ZERO, E2, ZERO, ZERO),
    }
    for i, row in rows.items():
        for j, want in enumerate(row):
            assert multiply(W, W.basis(i), W.basis(j)) == want, (i, j)


def test_shape_and_labels():
    assert W.dim == 4
    assert W.grades == (-1, 0, 1, 2)
    assert W.unit_index == 1


def test_multiply_dimension_mismatch():
    with pytest.raises(ValueError):
        multiply(W, Element.zero(3), E0)


def test_unit():
    assert check_unit(W, E0)
    assert not check_unit(W, E1)
    Z = AlgebraSpec.from_products(["a", "b"], {})
    assert not check_unit(Z, Z.basis(0))


def test_grading():
    assert check_grading(W, (-1, 0, 1, 2))
    assert not check_grading(W, (0, 0, 0, 1))
    assert check_grading(W, (0, 0, 0, 0))


def test_simplicity():
    assert check_simple(W)
    assert multiplication_algebra_dim(W) == 16
    assert not check_simple(AlgebraSpec.from_products(["a", "b"], {}))
    WW = direct_sum(W, W)
    assert WW.dim == 8
    assert not check_simple(WW)
    assert multiplication_algebra_dim(WW) < 64


def test_basis_products_are_basis_vectors_or_zero():
    for i, j in product(range(4), repeat=2):
        coeffs = multiply(W, W.basis(i), W.basis(j)).coeffs
        nonzero = [c for c in coeffs if c]
        assert nonzero in ([], [1])


def test_grading_closure():
    g = W.grades
    for i, j in product(range(4), repeat=2):
        if g[i] + g[j] not in g:
            assert multiply(W, W.basis(i), W.basis(j)).is_zero()


@given(elements, elements, elements, fractions, fractions)
def test_bilinear(x, y, z, a, b):
    left = multiply(W, x.scale(a) + y.scale(b), z)
    assert left == multiply(W, x, z).scale(a) + multiply(W, y, z).scale(b)
    right = multiply(W, z, x.scale(a) + y.scale(b))
    assert right == multiply(W, z, x).scale(a) + multiply(W, z, y).scale(b)


@given(st.lists(st.integers(-10**6, 10**6), min_size=8, max_size=8), st.sampled_from([P1, P2]))
def test_residue_mode_matches_rationals(ints, p):
    x = Element(tuple(Fraction(v) for v in ints[:4]))
    y = Element(tuple(Fraction(v) for v in ints[4:]))
    exact = multiply(W, x, y)
    modular = multiply(W, x.reduce(p), y.reduce(p))
    assert modular == exact.reduce(p)


def test_residue_basics():
    r = Residue(-1, P1)
    assert r.value == P1 - 1
    assert r + 1 == Residue(0, P1)
    assert (Residue(3, P1) / 3) == Residue(1, P1)
    assert to_residue(Fraction(1, 2), 7) == 4


def test_json_round_trip():
    data = W.to_json()
    again = algebra_from_json(data)
    assert again == W
    assert again.canonical() == W.canonical()
    assert again.digest() == W.digest()


def test_third_stays_exact():
    A = algebra_from_json({"dim": 1, "basis": ["u"], "table": [[[[0, "1/3"]]]]})
    assert A.table[0][0][0] == Fraction(1, 3)
    assert isinstance(A.table[0][0][0], Fraction)


@pytest.mark.parametrize("data, fragment", [
    ({"dim": 2, "basis": ["a", "b"], "table": [[[]], []]}, "table[0]"),
    ({"dim": 1, "basis": ["a"], "table": [[[[0, 0.5]]]]}, "table[0][0][0]"),
    ({"dim": 1, "basis": ["a"], "table": [[[[3, "1"]]]]}, "out of range"),
    ({"dim": 1, "basis": ["a"], "table": [[[[0, "1/0"]]]]}, "bad coefficient"),
    ({"basis": ["a"], "table": []}, "dim"),
    ({"dim": 2, "basis": ["a"], "table": []}, "basis"),
])
def test_schema_errors(data, fragment):
    with pytest.raises(SchemaError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        algebra_from_json(data)
