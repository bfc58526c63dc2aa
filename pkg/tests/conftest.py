"""Shared fixtures and brute-force oracles.

The oracles here work on nested lists of ``Fraction`` and use nothing from
the package except to read the j-map entries, so they check the vectorised
code independently.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from nilcurv import catalog
from nilcurv.liealg import JMap

PRINTED_PAIRS = ("fourthree", "fivethree", "sixtwo")
SMALL_IDS = [eid for eid in catalog.ids()
             if catalog.get(eid).j.m + catalog.get(eid).j.r <= 12]


def jmats(j: JMap) -> list[list[list[Fraction]]]:
    return [[[Fraction(int(j.num[a, i, k]), j.den) for k in range(j.m)] for i in range(j.m)]
            for a in range(j.r)]


# ---------------------------------------------------------------------------
# linear algebra


def mm(a, b):
    n, p, q = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][l] for k in range(p)), Fraction(0)) for l in range(q)]
            for i in range(n)]


def tr(a):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def det(a):
    """Fraction Gaussian elimination."""
    a = [row[:] for row in a]
    n = len(a)
    sign, out = 1, Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        out *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return sign * out


def charpoly_by_interpolation(a) -> list[Fraction]:
    """``det(x I - a)`` sampled at ``n + 1`` integers and interpolated."""
    n = len(a)
    xs = list(range(n + 1))
    ys = [det([[Fraction(x * (i == k)) - a[i][k] for k in range(n)] for i in range(n)])
          for x in xs]
    coeffs = [Fraction(0)] * (n + 1)  # lowest degree first
    for i, xi in enumerate(xs):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for k, xk in enumerate(xs):
            if k == i:
                continue
            basis = [Fraction(0)] + basis
            for d in range(len(basis) - 1):
                basis[d] -= xk * basis[d + 1]
            denom *= xi - xk
        for d in range(n + 1):
            coeffs[d] += ys[i] * basis[d] / denom
    return coeffs[::-1]


# ---------------------------------------------------------------------------
# geometry by the textbook formulas


class BruteGeometry:
    """Levi-Civita data of the left-invariant metric from the Koszul formula."""

    def __init__(self, j: JMap):
        m, r = j.m, j.r
        n = m + r
        self.n, self.m = n, m
        J = jmats(j)
        # structure constants c[A][B][C] = <[e_A, e_B], e_C>
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for k in range(m):
            for l in range(m):
                for a in range(r):
                    c[k][l][m + a] = J[a][l][k]  # <j_a X_k, X_l>
        self.c = c
        # <nabla_A e_B, e_C> = 1/2 (c_ABC - c_BCA + c_CAB)
        self.G = [[[(c[A][B][C] - c[B][C][A] + c[C][A][B]) / 2 for C in range(n)]
                   for B in range(n)] for A in range(n)]
        self._R = None

    def nabla(self, A, vec):
        """``nabla_{e_A}`` of a constant-coefficient vector."""
        n = self.n
        return [sum((vec[B] * self.G[A][B][C] for B in range(n)), Fraction(0)) for C in range(n)]

    def nabla_vec(self, X, vec):
        n = self.n
        out = [Fraction(0)] * n
        for A in range(n):
            if X[A]:
                w = self.nabla(A, vec)
                for C in range(n):
                    out[C] += X[A] * w[C]
        return out

    def R(self):
        if self._R is not None:
            return self._R
        n = self.n
        e = [[Fraction(int(i == k)) for k in range(n)] for i in range(n)]
        R = [[[[Fraction(0)] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for a, b, cc in itertools.product(range(n), repeat=3):
            br = self.c[a][b]
            t1 = self.nabla_vec(br, e[cc])
            t2 = self.nabla(a, self.nabla(b, e[cc]))
            t3 = self.nabla(b, self.nabla(a, e[cc]))
            for d in range(n):
                R[a][b][cc][d] = t1[d] - t2[d] + t3[d]
        self._R = R
        return R

    def ric(self):
        n, R = self.n, self.R()
        return [[sum((R[i][j][i][k] for i in range(n)), Fraction(0)) for k in range(n)]
                for j in range(n)]

    def cov(self, T: dict, arity: int) -> dict:
        """``(nabla_A T)(B..) = -sum_i T(.., nabla_A B_i, ..)`` on dense dicts."""
        n = self.n
        out = {}
        for A in range(n):
            for idx in itertools.product(range(n), repeat=arity):
                s = Fraction(0)
                for i in range(arity):
                    for C in range(n):
                        g = self.G[A][idx[i]][C]
                        if g:
                            s -= g * T[idx[:i] + (C,) + idx[i + 1:]]
                out[(A,) + idx] = s
        return out


def as_dict(t, arity: int, n: int) -> dict:
    out = {}
    for idx in itertools.product(range(n), repeat=arity):
        v = t
        for i in idx:
            v = v[i]
        out[idx] = v
    return out


def brute_trace_invariant(spec: str, j: JMap) -> Fraction:
    """Literal definition: sum over index assignments of products of traces."""
    groups = spec.split("|")
    letters = sorted(set(spec) - {"|"})
    J = jmats(j)
    total = Fraction(0)
    for vals in itertools.product(range(j.r), repeat=len(letters)):
        env = dict(zip(letters, vals))
        term = Fraction(1)
        for g in groups:
            prod = None
            for ch in g:
                prod = J[env[ch]] if prod is None else mm(prod, J[env[ch]])
            term *= tr(prod)
        total += term
    return total


# ---------------------------------------------------------------------------
# strategies


@st.composite
def small_jmaps(draw, max_m=4, max_r=3, max_entry=3):
    m = draw(st.integers(2, max_m))
    r = draw(st.integers(1, max_r))
    mats = []
    for _ in range(r):
        a = [[Fraction(0)] * m for _ in range(m)]
        for i in range(m):
            for k in range(i + 1, m):
                v = draw(st.integers(-max_entry, max_entry))
                a[i][k], a[k][i] = Fraction(v), Fraction(-v)
        mats.append(a)
    return JMap.from_lists(mats)


@pytest.fixture(scope="session")
def fourthree():
    return catalog.get("fourthree").j


# ---------------------------------------------------------------------------
# acceptance summary: one PASS/FAIL line per criterion at the end of the run

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}")
