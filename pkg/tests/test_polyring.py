import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from essig.linalg import SingularMatrixError, solve_rational
from essig.polyring import (
    DISK_FACTOR,
    ONE,
    Z1,
    Z2,
    BivarPoly,
    DivisionRemainderError,
    divide_exact,
    evaluate,
    homogeneous_parts,
    laplacian,
    p_mul,
    partial,
    poly_from_json,
    poly_to_json,
)


@st.composite
def polys(draw, max_deg=4):
    terms = draw(
        st.dictionaries(
            st.tuples(st.integers(0, max_deg), st.integers(0, max_deg)),
            st.fractions(min_value=-4, max_value=4, max_denominator=7),
            max_size=5,
        )
    )
    return BivarPoly(terms)


def test_ring_examples():
    assert DISK_FACTOR * ONE == DISK_FACTOR
    assert p_mul(Z1, Z2) == BivarPoly.monomial(1, 1)
    assert (Z1 + Z2) ** 2 == Z1 * Z1 + 2 * Z1 * Z2 + Z2 * Z2


def test_zero_degree():
    assert BivarPoly().degree == float("-inf")
    assert BivarPoly({(1, 0): 0}).is_zero()


@pytest.mark.parametrize(
    "p,expected",
    [
        (Z1 * Z1 + Z2 * Z2, BivarPoly.constant(4)),
        (DISK_FACTOR * Fraction(-1, 4), ONE),
        (Z1**3 * Z2**2, 6 * Z1 * Z2**2 + 2 * Z1**3),
    ],
)
def test_laplacian(p, expected):
    assert laplacian(p) == expected


def test_partial():
    assert partial(Z1 * Z1 * Z2, 1) == 2 * Z1 * Z2
    assert partial(Z1 * Z1 * Z2, 2) == Z1 * Z1
    with pytest.raises(ValueError):
        partial(Z1, 3)


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + q == q + p and p * q == q * p
    assert p - p == BivarPoly()


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_leibniz_laplacian(p, q):
    cross = partial(p, 1) * partial(q, 1) + partial(p, 2) * partial(q, 2)
    assert laplacian(p * q) == p * laplacian(q) + q * laplacian(p) + 2 * cross


@settings(max_examples=40, deadline=None)
@given(polys())
def test_homogeneous_parts_reassemble(p):
    parts = homogeneous_parts(p)
    total = BivarPoly()
    for k, part in parts.items():
        assert all(i + j == k for i, j in part.terms)
        total = total + part
    assert total == p


def test_homogeneous_parts_examples():
    assert homogeneous_parts(ONE + Z1 * Z1) == {0: ONE, 2: Z1 * Z1}
    assert list(homogeneous_parts(Z1 * Z2)) == [2]


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5])
def test_L_of_homogeneous_has_two_degrees(n):
    g = sum((BivarPoly.monomial(j, n - j, j + 1) for j in range(n + 1)), BivarPoly())
    assert set(homogeneous_parts(laplacian(DISK_FACTOR * g))) <= {n, n - 2}


@settings(max_examples=40, deadline=None)
@given(polys())
def test_divide_exact_recovers(p):
    assert divide_exact(DISK_FACTOR * p, DISK_FACTOR) == p


def test_divide_exact_remainder():
    assert divide_exact(DISK_FACTOR * Z1, DISK_FACTOR) == Z1
    with pytest.raises(DivisionRemainderError) as info:
        divide_exact(Z1, DISK_FACTOR)
    assert info.value.remainder == Z1


@pytest.mark.parametrize(
    "z,expected", [((0, 0), 1), ((1, 0), 0), ((Fraction(3, 10), Fraction(2, 5)), Fraction(3, 4))]
)
def test_evaluate_exact(z, expected):
    assert evaluate(DISK_FACTOR, *z) == expected


def test_evaluate_float():
    assert evaluate(DISK_FACTOR, 0.3, 0.4) == pytest.approx(0.75, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(polys())
def test_json_roundtrip(p):
    data = json.loads(json.dumps(poly_to_json(p)))
    assert poly_from_json(data) == p
    keys = [(t["e1"] + t["e2"], t["e1"]) for t in data]
    assert keys == sorted(keys)


def test_solve_rational():
    A = [[2, 1], [1, 3]]
    x = solve_rational(A, [Fraction(3), Fraction(5)])
    assert x == [Fraction(4, 5), Fraction(7, 5)]
    with pytest.raises(SingularMatrixError):
        solve_rational([[1, 2], [2, 4]], [1, 1])
