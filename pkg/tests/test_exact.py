from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilcurv.exact import (
    DimensionError,
    Mat,
    cayley_orthogonal,
    charpoly,
    format_rational,
    inverse,
    mat_mul,
    parse_rational,
    trace_product,
)

from conftest import charpoly_by_interpolation, mm, tr

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=7)


def square(n):
    return st.lists(st.lists(fractions, min_size=n, max_size=n), min_size=n, max_size=n)


@st.composite
def square_mats(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    return draw(square(n))


def test_parse_and_format_roundtrip():
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert parse_rational(" 7 ") == 7
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-5, 10)) == "-1/2"
    for bad in ("1.5", "1/0", "", "a/b", "1e3"):
        with pytest.raises(ValueError):
            parse_rational(bad)


@given(st.fractions(max_denominator=1000))
def test_format_parse_inverse(x):
    assert parse_rational(format_rational(x)) == x


@settings(max_examples=50)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(square(n), square(n))))
def test_mat_mul_matches_definition(ab):
    a, b = ab
    got = mat_mul(Mat.from_rows(a), Mat.from_rows(b))
    assert got.to_rows() == mm(a, b)


def test_mat_mul_shape_error():
    with pytest.raises(DimensionError):
        mat_mul(Mat.zeros(2, 3), Mat.zeros(2, 3))


@settings(max_examples=40)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(square(n), min_size=1, max_size=4)))
def test_trace_product_cyclic_and_exact(ms):
    mats = [Mat.from_rows(m) for m in ms]
    expected = ms[0]
    for m in ms[1:]:
        expected = mm(expected, m)
    assert trace_product(mats) == tr(expected)
    rotated = mats[1:] + mats[:1]
    assert trace_product(rotated) == trace_product(mats)


def test_trace_product_large_entries_no_overflow():
    big = Mat(np.array([[2**40, 1], [0, 2**40]], dtype=object))
    assert trace_product([big, big, big]) == 2 * 2**120


@settings(max_examples=40)
@given(square_mats())
def test_charpoly_matches_interpolation_oracle(a):
    assert charpoly(Mat.from_rows(a)) == charpoly_by_interpolation(a)


@settings(max_examples=25)
@given(square_mats(max_n=4))
def test_charpoly_similarity_invariant(a):
    n = len(a)
    # unit upper-triangular change of basis
    P = Mat.from_rows([[Fraction(int(i == k)) + (Fraction(k - i) if k > i else 0) for k in range(n)]
                       for i in range(n)])
    A = Mat.from_rows(a)
    assert charpoly(P @ A @ inverse(P)) == charpoly(A)


def test_charpoly_skew_known():
    # rotation generator: x^2 + 1
    assert charpoly(Mat.from_rows([[0, -1], [1, 0]])) == [1, 0, 1]


@settings(max_examples=25)
@given(st.integers(2, 4).flatmap(
    lambda n: st.lists(fractions, min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2)
    .map(lambda xs, n=n: (n, xs))))
def test_cayley_transform_is_orthogonal(data):
    n, xs = data
    rows = [[Fraction(0)] * n for _ in range(n)]
    it = iter(xs)
    for i in range(n):
        for k in range(i + 1, n):
            v = next(it)
            rows[i][k], rows[k][i] = v, -v
    Q = cayley_orthogonal(Mat.from_rows(rows))
    assert Q @ Q.T == Mat.identity(n)
