import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilcurv import catalog
from nilcurv.exact import DimensionError, charpoly
from nilcurv.isospec import (
    DegenerateGramError,
    LatticeBasis,
    default_zbox,
    gordon_wilson_check,
    hermite_normal_form,
    jmap_isospectral,
    kernel_lattice,
    length_spectrum,
)

from conftest import PRINTED_PAIRS


def brute_kernel_spectrum(j, z, radius2):
    """Count integer x with j_Z x = 0 and |x|^2 <= radius2 by scanning a box."""
    a = j.at(z)
    rows = a.to_rows()
    bound = int(radius2**0.5)
    counts = {}
    for x in itertools.product(range(-bound, bound + 1), repeat=j.m):
        n2 = sum(c * c for c in x)
        if n2 > radius2:
            continue
        if all(sum(r[k] * x[k] for k in range(j.m)) == 0 for r in rows):
            counts[Fraction(n2)] = counts.get(Fraction(n2), 0) + 1
    return counts


def test_default_zbox():
    assert default_zbox(4) == 3
    assert default_zbox(5) == 4
    assert default_zbox(6) == 4


@pytest.mark.parametrize("pid", PRINTED_PAIRS)
def test_printed_pairs_isospectral(pid):
    a, b = catalog.get_pair(pid)
    res = jmap_isospectral(a.j, b.j)
    assert res.isospectral and res.sufficient and res.method == "grid"
    assert res.points_checked == (2 * res.zbox + 1) ** a.j.r


def test_sixtwo_corrected_charpoly():
    a, b = catalog.get_pair("sixtwo")
    for z in itertools.product(range(-3, 4), repeat=2):
        want = catalog.sixtwo_charpoly(*z, printed=False)
        assert tuple(charpoly(a.j.at(z))) == want
        assert tuple(charpoly(b.j.at(z))) == want


def test_scaled_map_not_isospectral_with_witness():
    j = catalog.get("fivethree").j
    res = jmap_isospectral(j, j.scaled(2))
    assert not res.isospectral
    assert res.witness is not None and any(res.witness)
    pa, pb = res.witness_charpolys
    assert pa != pb
    assert tuple(charpoly(j.at(res.witness))) == pa


def test_small_grid_flagged_insufficient():
    a, b = catalog.get_pair("sixtwo")
    res = jmap_isospectral(a.j, b.j, zbox=1)
    assert res.isospectral and not res.sufficient
    assert "does not suffice" in res.rationale


def test_heisenberg_certificate_agrees_with_grid():
    a, b = catalog.get_pair("heis3")
    cert = jmap_isospectral(a.j, b.j)
    assert cert.method == "heisenberg-certificate" and cert.isospectral
    grid = jmap_isospectral(a.j, b.j, zbox=4, use_certificate=False)
    assert grid.method == "grid" and grid.isospectral and grid.sufficient


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        jmap_isospectral(catalog.get("fourthree").j, catalog.get("sixtwo").j)


def test_kernel_lattices_sixtwo():
    for eid in ("sixtwo", "sixtwo-prime"):
        j = catalog.get(eid).j
        assert kernel_lattice(j, (1, 0)).canonical() == ((0, 1, 0, 0, 0, 0), (0, 0, 0, 0, 1, 0))
        assert kernel_lattice(j, (3, 0)).rank == 2
        assert kernel_lattice(j, (1, 1)).rank == 0
        assert kernel_lattice(j, (0, 0)).rank == 6
    assert kernel_lattice(catalog.get("fourthree").j, (1, 0, 0)).rank == 0


@pytest.mark.parametrize("eid", ["fourthree", "fivethree", "fivethree-prime", "sixtwo"])
def test_kernel_lattice_sign_invariant(eid):
    j = catalog.get(eid).j
    for z in itertools.product(range(-2, 3), repeat=j.r):
        neg = tuple(-c for c in z)
        assert kernel_lattice(j, z).canonical() == kernel_lattice(j, neg).canonical()


@pytest.mark.parametrize("eid,z", [("sixtwo", (2, 0)), ("fivethree", (1, 0, 0)),
                                   ("fivethree-prime", (0, 1, -1)), ("sixtwo", (0, 0))])
def test_kernel_spectrum_against_box_scan(eid, z):
    j = catalog.get(eid).j
    radius2 = 4 if j.m == 6 and not any(z) else 9
    got = length_spectrum(kernel_lattice(j, z), radius2).as_dict()
    assert got == brute_kernel_spectrum(j, z, radius2)


def test_length_spectrum_square_lattice():
    z2 = LatticeBasis(((1, 0), (0, 1)), 2)
    assert length_spectrum(z2, 2).as_dict() == {0: 1, 1: 4, 2: 4}
    assert length_spectrum(LatticeBasis((), 3), 5).as_dict() == {0: 1}
    with pytest.raises(ValueError):
        length_spectrum(z2, 0)
    with pytest.raises(DegenerateGramError):
        length_spectrum(LatticeBasis(((1, 1), (2, 2)), 2), 4)


@st.composite
def unimodular(draw, n):
    """Product of elementary integer row operations."""
    U = [[int(i == k) for k in range(n)] for i in range(n)]
    for _ in range(draw(st.integers(0, 6))):
        i, k = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if i == k:
            U[i] = [-x for x in U[i]]
        else:
            c = draw(st.integers(-2, 2))
            U[i] = [x + c * y for x, y in zip(U[i], U[k])]
    return U


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_spectrum_and_hnf_basis_independent(data):
    n = data.draw(st.integers(1, 3))
    amb = n + data.draw(st.integers(0, 1))
    vecs = tuple(tuple(int(i == k) * data.draw(st.integers(1, 3)) + (data.draw(st.integers(-1, 1)) if k > i else 0)
                       for k in range(amb)) for i in range(n))
    lat = LatticeBasis(vecs, amb)
    other = lat.transformed(data.draw(unimodular(n)))
    assert length_spectrum(lat, 12) == length_spectrum(other, 12)
    assert lat.canonical() == other.canonical()
    assert hermite_normal_form(vecs) == lat.canonical()


@pytest.mark.parametrize("pid", PRINTED_PAIRS)
def test_gordon_wilson_printed(pid):
    a, b = catalog.get_pair(pid)
    rep = gordon_wilson_check(a.j, b.j)
    assert rep.passed, rep
    assert rep.closure == (True, True)
    assert "finite" in rep.caveat
    assert rep.lattice_points == (2 * rep.zbox + 1) ** a.j.r


def test_gordon_wilson_self_pair_and_failure():
    j = catalog.get("sixtwo").j
    assert gordon_wilson_check(j, j).passed
    bad = gordon_wilson_check(j, j.scaled(2))
    assert not bad.passed and not bad.isospectral.isospectral


def test_gordon_wilson_lattice_mismatch_detected():
    from nilcurv.liealg import JMap
    F = Fraction
    a = JMap.from_lists([[[0, 1, 0], [-1, 0, 0], [0, 0, 0]]])
    b = JMap.from_lists([[[0, 0, 0], [0, 0, 1], [0, -1, 0]]])
    # skew matrix of the unit vector (3/5, 4/5, 0): same spectrum, kernel Z(3, 4, 0)
    c = JMap.from_lists([[[0, 0, F(-4, 5)], [0, 0, F(3, 5)], [F(4, 5), F(-3, 5), 0]]])
    assert gordon_wilson_check(a, b).passed  # kernels Z e3 and Z e1 are isometric
    rep = gordon_wilson_check(a, c)
    assert rep.isospectral.isospectral
    assert not rep.lattices_pass
    assert (1,) in rep.lattice_failures and (0,) not in rep.lattice_failures


def test_heisenberg_pair_uses_certificate():
    a, b = catalog.get_pair("heis7")
    rep = gordon_wilson_check(a.j, b.j)
    assert rep.passed and rep.lattice_method == "heisenberg-certificate"
