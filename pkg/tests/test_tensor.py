import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rational_tensors
from essig.tensor import (
    FLOAT64,
    RATIONAL,
    SingularElementError,
    TruncatedTensor,
    add,
    dilate,
    exp_increment,
    homogeneous_norm,
    index_to_word,
    inverse,
    mul,
    project_level,
    project_word,
    rotate,
    rotation_matrix,
    scale,
    tensor_from_dict,
    tensor_to_dict,
    unit,
    word_to_index,
    zero,
)
from essig.mc import signature_of_path

QUARTER = ((0, -1), (1, 0))


def test_unit_and_zero():
    u = unit(2, 3)
    assert [lev.tolist() for lev in u.levels] == [[1.0], [0.0] * 2, [0.0] * 4, [0.0] * 8]
    assert add(zero(2, 3), u) == u
    assert project_level(u, 0)[0] == 1


@pytest.mark.parametrize("d,N", [(1, 0), (1, 5), (2, 4), (3, 3)])
def test_level_lengths(d, N):
    t = zero(d, N, RATIONAL)
    assert [len(lev) for lev in t.levels] == [d**k for k in range(N + 1)]


@pytest.mark.parametrize("word,d", [("", 2), ("1", 2), ("21", 2), ("2112", 2), ("312", 3)])
def test_word_index_roundtrip(word, d):
    letters = tuple(int(c) for c in word)
    idx = word_to_index(letters, d)
    assert index_to_word(idx, len(letters), d) == letters
    assert idx == sum((c - 1) * d ** (len(letters) - 1 - j) for j, c in enumerate(letters))


def test_add_scale():
    u = unit(2, 2, RATIONAL)
    assert project_word(add(u, u), "") == 2
    a = exp_increment([Fraction(1, 2), Fraction(-1, 3)], 3, RATIONAL)
    assert scale(0, a) == zero(2, 3, RATIONAL)
    assert add(a, scale(-1, a)) == zero(2, 3, RATIONAL)


def test_mixing_kinds_is_an_error():
    with pytest.raises(TypeError):
        add(unit(2, 2, RATIONAL), unit(2, 2, FLOAT64))
    with pytest.raises((TypeError, ValueError)):
        mul(unit(2, 2), unit(2, 3))


def test_mul_single_split():
    a = TruncatedTensor.from_words(2, 2, {"": 1, "1": 1}, RATIONAL)
    b = TruncatedTensor.from_words(2, 2, {"": 1, "2": 1}, RATIONAL)
    c = mul(a, b)
    assert c["12"] == 1 and c["21"] == 0


@settings(max_examples=25, deadline=None)
@given(rational_tensors(N=4), rational_tensors(N=4), rational_tensors(N=4))
def test_mul_associative(a, b, c):
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


@settings(max_examples=25, deadline=None)
@given(rational_tensors(N=3))
def test_unit_is_neutral(a):
    u = unit(2, 3, RATIONAL)
    assert mul(u, a) == a == mul(a, u)


@settings(max_examples=25, deadline=None)
@given(rational_tensors(N=5, unit_level0=True))
def test_inverse_exact(a):
    assert mul(a, inverse(a)) == unit(2, 5, RATIONAL)
    assert mul(inverse(a), a) == unit(2, 5, RATIONAL)


def test_inverse_examples():
    assert inverse(unit(2, 4, RATIONAL)) == unit(2, 4, RATIONAL)
    assert inverse(exp_increment([1, 0], 4, RATIONAL)) == exp_increment([-1, 0], 4, RATIONAL)
    with pytest.raises(SingularElementError):
        inverse(zero(2, 3, RATIONAL))


def test_inverse_of_random_group_like():
    g = signature_of_path([[0, 0], [Fraction(1, 2), 1], [-1, Fraction(2, 3)], [3, -2]], 5)
    assert mul(g, inverse(g)) == unit(2, 5, RATIONAL)


@pytest.mark.parametrize(
    "v,N,word,expected",
    [
        ((1, 0), 3, "111", Fraction(1, 6)),
        ((1, 0), 3, "11", Fraction(1, 2)),
        ((1, 1), 2, "12", Fraction(1, 2)),
        ((2, 3), 3, "212", Fraction(3 * 2 * 3, 6)),
    ],
)
def test_exp_increment(v, N, word, expected):
    assert exp_increment(v, N, RATIONAL)[word] == expected


def test_exp_zero_is_unit():
    assert exp_increment([0, 0], 4, RATIONAL) == unit(2, 4, RATIONAL)


def test_project_out_of_range():
    with pytest.raises((IndexError, ValueError)):
        project_word(unit(2, 2), "111")
    with pytest.raises((IndexError, ValueError)):
        project_level(unit(2, 2), 3)


def test_dilate():
    a = exp_increment([Fraction(1, 3), Fraction(-2, 5)], 4, RATIONAL)
    assert dilate(1, a) == a
    assert dilate(0, a) == unit(2, 4, RATIONAL)
    assert dilate(2, a) == exp_increment([Fraction(2, 3), Fraction(-4, 5)], 4, RATIONAL)


@settings(max_examples=20, deadline=None)
@given(rational_tensors(N=3), rational_tensors(N=3), st.fractions(min_value=0, max_value=3, max_denominator=5))
def test_dilate_multiplicative(a, b, eps):
    assert dilate(eps, mul(a, b)) == mul(dilate(eps, a), dilate(eps, b))


@settings(max_examples=20, deadline=None)
@given(rational_tensors(N=3), rational_tensors(N=3))
def test_quarter_turn_automorphism(a, b):
    assert rotate(QUARTER, mul(a, b)) == mul(rotate(QUARTER, a), rotate(QUARTER, b))


def test_rotate_examples():
    a = TruncatedTensor.from_words(2, 2, {"": 1, "1": 1}, RATIONAL)
    assert rotate(((1, 0), (0, 1)), a) == a
    assert rotate(QUARTER, a) == TruncatedTensor.from_words(2, 2, {"": 1, "2": 1}, RATIONAL)
    with pytest.raises(ValueError):
        rotate(QUARTER, unit(3, 2))


@pytest.mark.parametrize("theta", [0.1, 1.0, 2.5, -4.0])
def test_rotate_inverse_numeric(theta, rng):
    a = TruncatedTensor.from_flat(2, 4, rng.standard_normal(31))
    back = rotate(rotation_matrix(theta), rotate(rotation_matrix(-theta), a))
    assert np.max(np.abs(back.flat() - a.flat())) <= 1e-12


def test_homogeneous_norm():
    assert homogeneous_norm(unit(2, 3)) == 0
    assert homogeneous_norm(exp_increment([3.0, 4.0], 1)) == pytest.approx(5.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 5), st.lists(st.floats(-2, 2), min_size=2, max_size=2))
def test_homogeneous_norm_scales(eps, v):
    a = exp_increment(v, 4)
    assert homogeneous_norm(dilate(eps, a)) == pytest.approx(eps * homogeneous_norm(a), rel=1e-12, abs=1e-12)


def test_immutable():
    a = unit(2, 2)
    with pytest.raises(AttributeError):
        a.truncation = 3
    with pytest.raises(ValueError):
        a.levels[0][0] = 5.0


def test_truncation_is_silent():
    a = exp_increment([1, 1], 2, RATIONAL)
    b = mul(a, a)
    assert b == exp_increment([2, 2], 2, RATIONAL)


@settings(max_examples=20, deadline=None)
@given(rational_tensors(N=3))
def test_json_roundtrip_rational(a):
    data = json.loads(json.dumps(tensor_to_dict(a)))
    assert tensor_from_dict(data) == a


def test_json_format():
    a = TruncatedTensor.from_words(2, 2, {"": 1, "12": Fraction(-2, 4)}, RATIONAL)
    data = tensor_to_dict(a)
    assert data["scalar"] == "rational"
    assert data["levels"][2]["coeffs"] == {"12": "-1/2"}
    assert data["levels"][1]["coeffs"] == {}
    f = tensor_from_dict(tensor_to_dict(exp_increment([0.1, math.pi], 3)))
    assert f == exp_increment([0.1, math.pi], 3)
