"""Hypotheses of the Gordon-Wilson isospectrality criterion.

For maps ``j``, ``j'`` with equal ``(m, r)`` the criterion asks that

1. ``j_Z`` and ``j'_Z`` are similar for every ``Z`` (equal characteristic
   polynomials, since both are skew),
2. both brackets map ``Z^m x Z^m`` into ``Z^r``,
3. for every ``Z`` in ``Z^r`` the lattices ``ker(j_Z) ∩ Z^m`` and
   ``ker(j'_Z) ∩ Z^m`` have the same length spectrum.

Condition 3 is checked on a finite box of ``Z`` and up to a finite radius,
and reports say so.  Laplace spectra are never computed.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import DimensionError, Mat, as_fraction, charpoly
from .heisenberg import is_heisenberg_type
from .liealg import JMap, build_algebra, gamma_lattice_closure_check

FLOAT_TOL = 1e-9
DEFAULT_RADIUS2 = Fraction(25)


def default_zbox(m: int) -> int:
    """``ceil(m/2 + 1)``: every axis of the grid then has at least ``m + 1`` points."""
    return math.ceil(Fraction(m, 2) + 1)


def z_grid(r: int, zbox: int):
    """Integer points of ``[-zbox, zbox]^r`` in lexicographic order."""
    return itertools.product(range(-zbox, zbox + 1), repeat=r)


def _check_pair(j: JMap, jp: JMap) -> None:
    if (j.m, j.r) != (jp.m, jp.r):
        raise DimensionError(f"(m, r) differ: {(j.m, j.r)} vs {(jp.m, jp.r)}")


@dataclass(frozen=True)
class IsospectralResult:
    isospectral: bool
    zbox: int
    method: str
    points_checked: int
    sufficient: bool
    rationale: str
    witness: tuple[int, ...] | None = None
    witness_charpolys: tuple[tuple[Fraction, ...], tuple[Fraction, ...]] | None = None


def _float_spectrum(a: Mat) -> np.ndarray:
    return np.sort(np.linalg.eigvals(a.to_float()).imag)


def jmap_isospectral(j: JMap, jp: JMap, zbox: int | None = None, *,
                     use_certificate: bool = True, exact: bool = True) -> IsospectralResult:
    """Compare characteristic polynomials of ``j_Z`` and ``j'_Z`` on an integer grid.

    Each coefficient is a polynomial of degree at most ``m`` in ``Z``; two
    such polynomials agreeing on a grid with at least ``m + 1`` points per
    axis are identical, so the grid check then covers every ``Z``.  Two
    Heisenberg-type maps with equal ``(m, r)`` both have characteristic
    polynomial ``(x^2 + |Z|^2)^(m/2)`` and are accepted without the grid.
    With ``exact=False`` only the float eigenvalue comparison runs where it
    finds no mismatch.
    """
    _check_pair(j, jp)
    zbox = default_zbox(j.m) if zbox is None else zbox
    if zbox < 0:
        raise ValueError("zbox must be non-negative")
    sufficient = 2 * zbox + 1 >= j.m + 1
    if use_certificate and j.r > 0 and is_heisenberg_type(j)[0] and is_heisenberg_type(jp)[0]:
        return IsospectralResult(
            True, zbox, "heisenberg-certificate", 0, True,
            "both maps satisfy j_Z^2 = -|Z|^2 Id, so both characteristic "
            "polynomials equal (x^2 + |Z|^2)^(m/2) for every Z",
        )
    rationale = (
        f"coefficients have degree <= {j.m} in Z; the grid has {2 * zbox + 1} points "
        f"per axis, which {'suffices' if sufficient else 'does not suffice'} "
        f"(need {j.m + 1})"
    )
    checked = 0
    for z in z_grid(j.r, zbox):
        a, b = j.at(z), jp.at(z)
        checked += 1
        pa = pb = None
        if np.max(np.abs(_float_spectrum(a) - _float_spectrum(b)), initial=0.0) > FLOAT_TOL:
            # a float mismatch only proposes a witness; the exact test decides
            pa, pb = charpoly(a), charpoly(b)
        elif exact:
            pa, pb = charpoly(a), charpoly(b)
        if pa is None:
            continue
        if pa != pb:
            return IsospectralResult(False, zbox, "grid", checked, sufficient, rationale,
                                     tuple(z), (tuple(pa), tuple(pb)))
    return IsospectralResult(True, zbox, "grid", checked, sufficient, rationale)


# ---------------------------------------------------------------------------
# integer lattices


def _echelon_with_transform(rows: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Unimodular ``U`` and echelon ``H`` with ``U @ rows = H`` (Python ints)."""
    n = len(rows)
    ncols = len(rows[0]) if rows else 0
    H = [list(r) for r in rows]
    U = [[int(i == k) for k in range(n)] for i in range(n)]
    piv_row = 0
    for col in range(ncols):
        if piv_row >= n:
            break
        # Euclid on column entries below piv_row
        while True:
            nz = [i for i in range(piv_row, n) if H[i][col] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][col]))
            H[piv_row], H[p] = H[p], H[piv_row]
            U[piv_row], U[p] = U[p], U[piv_row]
            done = True
            for i in range(piv_row + 1, n):
                if H[i][col]:
                    q = H[i][col] // H[piv_row][col]
                    H[i] = [x - q * y for x, y in zip(H[i], H[piv_row])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[piv_row])]
                    if H[i][col]:
                        done = False
            if done:
                break
        if any(H[i][col] for i in range(piv_row, n)):
            piv_row += 1
    return H, U


def hermite_normal_form(vectors: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Row-style HNF of the lattice spanned by ``vectors`` (zero rows dropped)."""
    if not vectors:
        return ()
    H, _ = _echelon_with_transform([list(map(int, v)) for v in vectors])
    H = [r for r in H if any(r)]
    # make pivots positive and reduce entries above each pivot
    pivots = []
    for i, row in enumerate(H):
        c = next(k for k, x in enumerate(row) if x)
        if row[c] < 0:
            H[i] = [-x for x in row]
        pivots.append(c)
    for i, c in enumerate(pivots):
        for k in range(i):
            q = H[k][c] // H[i][c]
            if q:
                H[k] = [x - q * y for x, y in zip(H[k], H[i])]
    return tuple(tuple(r) for r in H)


@dataclass(frozen=True)
class LatticeBasis:
    """Linearly independent integer vectors in ``Z^ambient``."""

    vectors: tuple[tuple[int, ...], ...]
    ambient: int

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def gram(self) -> list[list[int]]:
        return [[sum(a * b for a, b in zip(u, v)) for v in self.vectors] for u in self.vectors]

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        return hermite_normal_form(self.vectors)

    def transformed(self, unimodular: Sequence[Sequence[int]]) -> "LatticeBasis":
        vecs = tuple(
            tuple(sum(c * v[k] for c, v in zip(row, self.vectors)) for k in range(self.ambient))
            for row in unimodular
        )
        return LatticeBasis(vecs, self.ambient)


def kernel_lattice(j: JMap, z: Sequence[int]) -> LatticeBasis:
    """Saturated integral basis of ``ker(j_Z) ∩ Z^m``."""
    if any(int(c) != c for c in z):
        raise ValueError("Z must be integral")
    a = j.at([int(c) for c in z])
    m = j.m
    if a.is_zero():
        return LatticeBasis(tuple(tuple(int(i == k) for k in range(m)) for i in range(m)), m)
    # x in the kernel iff x^T A^T = 0; rows of U hitting zero rows of H span it
    At = [[int(v) for v in row] for row in a.num.T]
    H, U = _echelon_with_transform(At)
    kern = [U[i] for i in range(m) if not any(H[i])]
    return LatticeBasis(hermite_normal_form(kern), m)


@dataclass(frozen=True)
class LengthSpectrum:
    radius2: Fraction
    entries: tuple[tuple[Fraction, int], ...]

    def as_dict(self) -> dict[Fraction, int]:
        return dict(self.entries)


class DegenerateGramError(ValueError):
    pass


def _ldl(gram: list[list[int]]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """``Q(x) = sum_i d_i (x_i + sum_{k>i} mu[i][k] x_k)^2``."""
    n = len(gram)
    A = [[Fraction(x) for x in row] for row in gram]
    d, mu = [Fraction(0)] * n, [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = A[i][i]
        if d[i] <= 0:
            raise DegenerateGramError("Gram matrix is not positive definite")
        for k in range(i + 1, n):
            mu[i][k] = A[i][k] / d[i]
        for k in range(i + 1, n):
            for l in range(k, n):
                A[k][l] -= mu[i][k] * mu[i][l] * d[i]
                A[l][k] = A[k][l]
    return d, mu


def length_spectrum(basis: LatticeBasis, radius2=DEFAULT_RADIUS2) -> LengthSpectrum:
    """Squared lengths up to ``radius2`` with multiplicities (Fincke-Pohst enumeration)."""
    radius2 = as_fraction(radius2)
    if radius2 <= 0:
        raise ValueError("radius2 must be positive")
    n = basis.rank
    counts: dict[Fraction, int] = {Fraction(0): 1}
    if n == 0:
        return LengthSpectrum(radius2, ((Fraction(0), 1),))
    gram = basis.gram()
    d, mu = _ldl(gram)
    x = [0] * n

    def rec(i: int, remaining: Fraction) -> None:
        # centre of the admissible interval for x_i given x_{i+1..}
        c = -sum(mu[i][k] * x[k] for k in range(i + 1, n))
        half = remaining / d[i]
        # smallest/largest integers t with (t - c)^2 <= half
        lo = math.ceil(c - _isqrt_frac_upper(half))
        hi = math.floor(c + _isqrt_frac_upper(half))
        for t in range(lo, hi + 1):
            val = d[i] * (t - c) ** 2
            if val > remaining:
                continue
            x[i] = t
            if i == 0:
                q = radius2 - (remaining - val)
                if any(x):
                    counts[q] = counts.get(q, 0) + 1
            else:
                rec(i - 1, remaining - val)
        x[i] = 0

    rec(n - 1, radius2)
    return LengthSpectrum(radius2, tuple(sorted(counts.items())))


def _isqrt_frac_upper(f: Fraction) -> Fraction:
    """A rational upper bound for ``sqrt(f)`` tight to within 1."""
    if f <= 0:
        return Fraction(0)
    return Fraction(math.isqrt(f.numerator // f.denominator) + 1)


# ---------------------------------------------------------------------------
# the full checklist


@dataclass
class GordonWilsonReport:
    isospectral: IsospectralResult
    closure: tuple[bool, bool]
    zbox: int
    radius2: Fraction
    lattice_points: int = 0
    lattice_failures: list[tuple[int, ...]] = field(default_factory=list)
    lattice_method: str = "grid"
    identical_lattices: int = 0
    enumerated_pairs: int = 0
    caveat: str = ""

    @property
    def lattices_pass(self) -> bool:
        return not self.lattice_failures

    @property
    def passed(self) -> bool:
        return self.isospectral.isospectral and all(self.closure) and self.lattices_pass


def _primitive(z: tuple[int, ...]) -> tuple[int, ...]:
    g = math.gcd(*z)
    if g == 0:
        return z
    p = tuple(c // g for c in z)
    first = next(c for c in p if c)
    return p if first > 0 else tuple(-c for c in p)


def gordon_wilson_check(j: JMap, jp: JMap, zbox: int | None = None,
                        radius2=DEFAULT_RADIUS2) -> GordonWilsonReport:
    """Check the three hypotheses; the lattice condition on a finite ``Z`` box."""
    _check_pair(j, jp)
    radius2 = as_fraction(radius2)
    zbox = default_zbox(j.m) if zbox is None else zbox
    iso = jmap_isospectral(j, jp, zbox)
    closure = (gamma_lattice_closure_check(build_algebra(j)),
               gamma_lattice_closure_check(build_algebra(jp)))
    rep = GordonWilsonReport(iso, closure, zbox, radius2)
    heis = j.r > 0 and is_heisenberg_type(j)[0] and is_heisenberg_type(jp)[0]
    if heis:
        # j_Z is invertible for Z != 0, so both kernels are {0}; at Z = 0 both are Z^m
        rep.lattice_method = "heisenberg-certificate"
        rep.caveat = "kernel lattices agree for every Z: trivial for Z != 0, Z^m for Z = 0"
        return rep
    spectra: dict[tuple, LengthSpectrum] = {}
    by_direction: dict[tuple[int, ...], bool] = {}

    def spectrum(lat: LatticeBasis) -> LengthSpectrum:
        key = lat.canonical()
        if key not in spectra:
            spectra[key] = length_spectrum(lat, radius2)
        return spectra[key]

    for z in z_grid(j.r, zbox):
        rep.lattice_points += 1
        # the kernel of j_Z depends only on the line through Z
        key = _primitive(tuple(z))
        ok = by_direction.get(key)
        if ok is None:
            la, lb = kernel_lattice(j, key), kernel_lattice(jp, key)
            if la.canonical() == lb.canonical():
                rep.identical_lattices += 1
                ok = True
            else:
                rep.enumerated_pairs += 1
                ok = spectrum(la) == spectrum(lb)
            by_direction[key] = ok
        if not ok:
            rep.lattice_failures.append(tuple(z))
    rep.caveat = (
        f"kernel-lattice length spectra compared for Z in [-{zbox}, {zbox}]^{j.r} "
        f"up to squared length {radius2}; a finite check, not a proof for all Z"
    )
    return rep
