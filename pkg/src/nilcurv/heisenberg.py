"""Heisenberg-type maps from Clifford modules, wedge-operator traces and fingerprints.

``j`` is of Heisenberg type when ``j_Z j_W + j_W j_Z = -2 <Z, W> Id``.  Such
maps come from modules over the Clifford algebra ``C_r``; here ``r = 3``
(quaternions, ``d_3 = 4``) and ``r = 7`` (octonions, ``d_7 = 8``) are built.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exact import Mat, charpoly, trace_product
from .liealg import JMap, MetricLieAlgebra
from .traceinv import eval_trace_invariant

MODULE_DIM = {3: 4, 7: 8}

# lines of the Fano plane
FANO_LINES = ((1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6))
# oriented so that e_a e_b = e_c cyclically; two lines run against their
# listed order, otherwise the algebra is not alternative
FANO_TRIPLES = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))


class UnsupportedCliffordError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class CliffordModuleSpec:
    r: int
    a: int
    b: int

    def __post_init__(self):
        if self.r not in MODULE_DIM:
            raise UnsupportedCliffordError(
                f"r = {self.r} is not supported; choose r in {sorted(MODULE_DIM)}"
            )
        if self.a < 0 or self.b < 0 or self.a + self.b < 1:
            raise ValueError(f"need a, b >= 0 and a + b >= 1, got a={self.a}, b={self.b}")

    @property
    def d(self) -> int:
        return MODULE_DIM[self.r]

    @property
    def m(self) -> int:
        return (self.a + self.b) * self.d


def _mult_table(r: int) -> dict[tuple[int, int], tuple[int, int]]:
    """``e_a e_b = sign * e_c`` for imaginary units, as ``(a, b) -> (sign, c)``."""
    triples = ((1, 2, 3),) if r == 3 else FANO_TRIPLES
    table = {}
    for t in triples:
        for k in range(3):
            a, b, c = t[k], t[(k + 1) % 3], t[(k + 2) % 3]
            table[(a, b)] = (1, c)
            table[(b, a)] = (-1, c)
    return table


@lru_cache(maxsize=None)
def _plus_generators(r: int) -> tuple[np.ndarray, ...]:
    """Left multiplications by the imaginary units on the plus module."""
    d = MODULE_DIM[r]
    table = _mult_table(r)
    gens = []
    for a in range(1, r + 1):
        L = np.zeros((d, d), dtype=np.int64)
        for c in range(d):
            # column c is e_a * e_c
            if c == 0:
                L[a, 0] = 1
            elif c == a:
                L[0, a] = -1
            else:
                sign, out = table[(a, c)]
                L[out, c] = sign
        gens.append(L)
    omega = gens[0]
    for g in gens[1:]:
        omega = omega @ g
    eye = np.eye(d, dtype=np.int64)
    if np.array_equal(omega, -eye):
        # r is odd, so negating every generator flips the sign of omega
        gens = [-g for g in gens]
    elif not np.array_equal(omega, eye):  # pragma: no cover - table error
        raise AssertionError("product of generators is not +-Id")
    return tuple(gens)


def build_clifford_j(spec: CliffordModuleSpec) -> JMap:
    """Block-diagonal ``j`` on ``a`` plus modules followed by ``b`` minus modules."""
    gens = _plus_generators(spec.r)
    d, m = spec.d, spec.m
    mats = np.zeros((spec.r, m, m), dtype=np.int64)
    signs = [1] * spec.a + [-1] * spec.b
    for blk, sign in enumerate(signs):
        sl = slice(blk * d, (blk + 1) * d)
        for alpha in range(spec.r):
            mats[alpha, sl, sl] = sign * gens[alpha]
    return JMap(mats)


def clifford(r: int, a: int, b: int) -> JMap:
    return build_clifford_j(CliffordModuleSpec(r, a, b))


def is_heisenberg_type(j: JMap) -> tuple[bool, dict | None]:
    """Check ``j_a j_b + j_b j_a = -2 delta_ab Id`` on basis pairs.

    On failure the witness holds the first offending ``(alpha, beta)``
    (0-based) and the deviation matrix ``j_a j_b + j_b j_a + 2 delta_ab Id``.
    """
    if j.r == 0:
        return False, {"reason": "r = 0"}
    mats = j.mats()
    eye = Mat.identity(j.m)
    for a in range(j.r):
        for b in range(a, j.r):
            dev = mats[a] @ mats[b] + mats[b] @ mats[a]
            if a == b:
                dev = dev + eye.scale(2)
            if not dev.is_zero():
                return False, {"alpha": a, "beta": b, "deviation": dev}
    return True, None


def require_heisenberg(j: JMap) -> None:
    ok, witness = is_heisenberg_type(j)
    if not ok:
        raise PreconditionError(f"map is not of Heisenberg type: {witness}")


def omega_trace_squared(j: JMap) -> Fraction:
    """``Tr(j_1 ... j_r) ** 2``."""
    require_heisenberg(j)
    return trace_product(j.mats()) ** 2


# ---------------------------------------------------------------------------
# the curvature operator on v ^ v


@dataclass(frozen=True, eq=False)
class WedgeOperator:
    basis: tuple[tuple[int, int], ...]
    matrix: Mat

    @property
    def dim(self) -> int:
        return len(self.basis)

    def trace_power(self, q: int) -> Fraction:
        if q < 1:
            raise ValueError("q must be positive")
        if self.dim == 0:
            return Fraction(0)
        return trace_product([self.matrix] * q)


def wedge_basis(m: int) -> tuple[tuple[int, int], ...]:
    return tuple((k, l) for k in range(m) for l in range(k + 1, m))


def wedge_operator(alg: MetricLieAlgebra) -> WedgeOperator:
    """``<R(X_k ^ X_l), X_p ^ X_q> = <R(X_k, X_l) X_p, X_q>`` on ``k < l``, ``p < q``.

    The basis ``X_k ^ X_l`` is orthonormal for the induced inner product.
    """
    basis = wedge_basis(alg.m)
    R = alg.curvature
    if not basis:
        return WedgeOperator(basis, Mat.zeros(0))
    ks = np.array([k for k, _ in basis])
    ls = np.array([l for _, l in basis])
    block = R.num[ks[:, None], ls[:, None], ks[None, :], ls[None, :]]
    return WedgeOperator(basis, Mat(block, R.den))


def wedge_trace_formula(j: JMap, q: int) -> Fraction:
    """Closed form of ``Tr((R^{v^v})^q)`` valid for Heisenberg-type ``j``."""
    require_heisenberg(j)
    if q < 1:
        raise ValueError("q must be positive")
    letters = "abcdefghijklmnop"[:q]
    I_split = eval_trace_invariant(f"{letters}|{letters}", j)
    I_joined = eval_trace_invariant(letters + letters, j)
    m, r = j.m, j.r
    inner = (Fraction(1, 2) * I_split - Fraction(1, 2) * I_joined
             + r * (2 - r + m) ** q - r * (2 - r) ** q)
    return Fraction(-1, 4) ** q * inner


def e_vector(j: JMap, alpha: int) -> Mat:
    """Coordinates of ``E_Z = sum_k X_k ^ j_Z X_k`` on the wedge basis, as a column."""
    jm = j[alpha]
    basis = wedge_basis(j.m)
    # X_k ^ X_c with coefficient j[c, k]; coordinate on X_p ^ X_q (p<q) is j[q,p] - j[p,q]
    rows = [[jm[q, p] - jm[p, q]] for p, q in basis]
    return Mat.from_rows(rows)


def phi_operator(j: JMap) -> Mat:
    """``Phi(X ^ Y) = sum_alpha j_alpha X ^ j_alpha Y`` on the wedge basis."""
    basis = wedge_basis(j.m)
    index = {bq: i for i, bq in enumerate(basis)}
    n = len(basis)
    out = np.zeros((n, n), dtype=object)
    out[...] = 0
    J = j.num
    for col, (k, l) in enumerate(basis):
        for a in range(j.r):
            u, v = J[a][:, k], J[a][:, l]
            # (sum_p u_p X_p) ^ (sum_q v_q X_q)
            for p in np.nonzero(u)[0]:
                for q in np.nonzero(v)[0]:
                    if p == q:
                        continue
                    c = int(u[p]) * int(v[q])
                    if p < q:
                        out[index[(p, q)], col] += c
                    else:
                        out[index[(q, p)], col] -= c
    return Mat(out, j.den**2)


# ---------------------------------------------------------------------------
# fingerprints and scans


@dataclass(frozen=True)
class Fingerprint:
    ricci_charpoly: tuple[Fraction, ...]
    wedge_traces: tuple[Fraction, ...]

    def as_list(self) -> list[Fraction]:
        return list(self.ricci_charpoly) + list(self.wedge_traces)


def ricci_matrix(alg: MetricLieAlgebra) -> Mat:
    ric = alg.ricci
    return Mat(ric.num, ric.den)


def curvature_fingerprint(alg: MetricLieAlgebra, qmax: int) -> Fingerprint:
    """Ricci spectrum (as its exact characteristic polynomial) and wedge-power traces.

    Curvature-equivalent spaces have equal fingerprints.
    """
    W = wedge_operator(alg)
    traces = tuple(W.trace_power(q) for q in range(1, qmax + 1))
    return Fingerprint(tuple(charpoly(ricci_matrix(alg))), traces)


def allowed_differences(r: int, max_order: int = 6) -> frozenset[str]:
    """Order-6 ids that may differ between Heisenberg-type maps with equal ``(m, r)``.

    Nothing of order below ``2r`` may differ; for ``r = 3`` the invariants
    carrying ``I_{abc|abc}`` may.
    """
    if max_order < 2 * r:
        return frozenset()
    return frozenset({"grad_R2", "Rhat", "Rcirc", "lap_R_R"} if r == 3 else ())


def heisenberg_order_equality_scan(j: JMap, jp: JMap, max_order: int = 6, **kw) -> dict:
    """Evaluate the invariant battery on both maps and report which ids differ."""
    from .invariants import compare_reports, full_report

    require_heisenberg(j)
    require_heisenberg(jp)
    if (j.m, j.r) != (jp.m, jp.r):
        raise PreconditionError(f"(m, r) differ: {(j.m, j.r)} vs {(jp.m, jp.r)}")
    a = full_report(j, "first", **kw).filter_order(max_order)
    b = full_report(jp, "second", **kw).filter_order(max_order)
    rows = compare_reports(a, b)
    differing = sorted(k for k, row in rows.items() if row["differs"])
    allowed = allowed_differences(j.r, max_order)
    return {
        "rows": rows,
        "differing": differing,
        "allowed": sorted(allowed),
        "consistent": set(differing) <= allowed,
        "skipped": sorted(set(a.skipped) | set(b.skipped)),
    }


def lemma51_zero_trace_words(j: JMap, max_len: int | None = None):
    """Yield ``(word, trace)`` for products of distinct generators that must be traceless.

    Even length, or length strictly between 0 and ``r``.
    """
    mats = j.mats()
    top = j.r if max_len is None else max_len
    for ell in range(1, top + 1):
        if ell % 2 and ell >= j.r:
            continue
        for word in itertools.permutations(range(j.r), ell):
            yield word, trace_product([mats[a] for a in word])

