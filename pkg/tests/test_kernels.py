import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilcurv import catalog, kernels
from nilcurv.liealg import build_algebra, covariant_derivative
from nilcurv.tensor import FrameTensor, Pairing, complete_trace, trace_word

BACKENDS = kernels.available_backends()


def brute_contract(nums, labels, dim):
    nlab = 1 + max(l for lab in labels for l in lab)
    total = 0
    for vals in itertools.product(range(dim), repeat=nlab):
        term = 1
        for arr, lab in zip(nums, labels):
            term *= int(arr[tuple(vals[l] for l in lab)])
        total += term
    return total


@st.composite
def contraction_problem(draw):
    dim = draw(st.integers(1, 3))
    nlab = draw(st.integers(1, 3))
    slots = [l for l in range(nlab) for _ in range(2)]
    slots = draw(st.permutations(slots))
    cuts = sorted(draw(st.sets(st.integers(1, len(slots) - 1), max_size=2)))
    groups = [slots[a:b] for a, b in zip([0] + cuts, cuts + [len(slots)])]
    nums = [np.array(draw(st.lists(st.integers(-5, 5), min_size=dim ** len(g), max_size=dim ** len(g))),
                     dtype=np.int64).reshape((dim,) * len(g)) for g in groups]
    return nums, groups, dim


@settings(max_examples=60)
@given(contraction_problem())
def test_contract_matches_brute_force_on_every_backend(problem):
    nums, labels, dim = problem
    want = brute_contract(nums, labels, dim)
    for backend in BACKENDS:
        assert kernels.contract(nums, labels, dim, backend=backend) == want


def test_contract_switches_to_python_ints_near_overflow():
    big = np.full((2, 2), 2**31, dtype=np.int64)
    want = brute_contract([big, big, big], [[0, 1], [1, 2], [2, 0]], 2)
    assert want == 8 * 2**93
    for backend in BACKENDS:
        assert kernels.contract([big, big, big], [[0, 1], [1, 2], [2, 0]], 2, backend=backend) == want


@pytest.mark.parametrize("eid", ["fourthree", "sixtwo", "heis3-1-1"])
def test_covariant_derivative_backends_agree(eid):
    alg = build_algebra(catalog.get(eid).j)
    R, conn = alg.curvature, alg.connection
    results = [covariant_derivative(R, conn, backend=b) for b in BACKENDS]
    assert all(r == results[0] for r in results)


def test_covariant_derivative_object_fallback():
    # entries this large force the Python-int path; compare with a direct loop
    alg = build_algebra(catalog.get("fourthree").j)
    conn = alg.connection
    base = alg.ricci
    big = FrameTensor(base.num.astype(object) * 2**61, base.den, base.dim)
    for backend in BACKENDS:
        got = covariant_derivative(big, conn, backend=backend)
        assert got == covariant_derivative(base, conn, backend=backend).scale(2**61)


def test_pairing_validation():
    with pytest.raises(ValueError):
        Pairing.from_word("abc")
    with pytest.raises(ValueError):
        Pairing(3, ((0, 1),))
    assert Pairing.from_word("ab ab").pairs == ((0, 2), (1, 3))


def test_complete_trace_metric():
    g = FrameTensor.metric(5)
    assert complete_trace([g], Pairing.from_word("aa")) == 5
    assert trace_word("abab", g, g) == 5
    assert trace_word("aabb", g, g) == 25


def test_frame_tensor_rational_entries():
    t = FrameTensor.from_sparse(2, 2, {(0, 1): Fraction(1, 3), (1, 0): Fraction(-1, 2)})
    assert t.component(0, 1) == Fraction(1, 3)
    assert trace_word("abab", t, t) == Fraction(1, 9) + Fraction(1, 4)
