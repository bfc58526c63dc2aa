"""Metric two-step nilpotent Lie algebras built from a map j: z -> so(v).

Frame convention: indices ``0..m-1`` are the orthonormal basis ``X_k`` of
``v`` and ``m..m+r-1`` the basis ``Z_alpha`` of ``z``.  Curvature components
are ``R[a, b, c, d] = <R(e_a, e_b) e_c, e_d>`` with
``R(A, B) = nabla_[A,B] - [nabla_A, nabla_B]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels
from .exact import (
    DimensionError,
    Mat,
    as_fraction,
    common_scale,
    exact_einsum,
    INT64_SAFE,
    exact_matmul,
    max_abs,
    format_rational,
    normalize,
    parse_rational,
    shrink,
    widen,
)
from .tensor import FrameTensor, einsum


class NotSkewError(ValueError):
    def __init__(self, alpha: int, i: int, j: int, a, b):
        self.alpha, self.entry = alpha, (i, j)
        super().__init__(
            f"j_Z{alpha + 1} is not skew-symmetric: entry ({i}, {j}) = {a} "
            f"but entry ({j}, {i}) = {b}"
        )


class JMap:
    """The linear map ``j`` given by the matrices ``j_{Z_1}, ..., j_{Z_r}``.

    Stored as one integer array of shape ``(r, m, m)`` over a common
    denominator.
    """

    __slots__ = ("num", "den", "m", "r", "__dict__", "__weakref__")

    def __init__(self, mats: Sequence[Mat] | np.ndarray, den: int = 1, m: int | None = None):
        if isinstance(mats, np.ndarray):
            num = shrink(mats)
        else:
            mats = list(mats)
            if not mats:
                if m is None:
                    raise ValueError("an empty j-map needs m")
                num, den = np.zeros((0, m, m), dtype=np.int64), 1
            else:
                dens = [mt.den for mt in mats]
                den = math.lcm(*dens)
                num = shrink(np.array([widen(mt.num) * (den // mt.den) for mt in mats], dtype=object))
        if num.ndim != 3 or num.shape[1] != num.shape[2]:
            raise DimensionError(f"j-map data must have shape (r, m, m), got {num.shape}")
        num, den = normalize(num, den)
        for a in range(num.shape[0]):
            bad = np.argwhere(num[a] != -num[a].T)
            if len(bad):
                i, k = (int(x) for x in bad[0])
                raise NotSkewError(a, i, k, Fraction(int(num[a, i, k]), den),
                                   Fraction(int(num[a, k, i]), den))
        num = np.array(num, copy=True)
        num.flags.writeable = False
        self.num = num
        self.den = den
        self.r = num.shape[0]
        self.m = num.shape[1]

    @classmethod
    def from_lists(cls, mats: Sequence[Sequence[Sequence]]) -> "JMap":
        return cls([Mat.from_rows(rows) for rows in mats])

    @classmethod
    def zero(cls, m: int, r: int) -> "JMap":
        return cls(np.zeros((r, m, m), dtype=np.int64))

    @classmethod
    def from_json(cls, obj: dict) -> "JMap":
        m, r = int(obj["m"]), int(obj["r"])
        mats = obj["mats"]
        if len(mats) != r:
            raise ValueError(f"expected {r} matrices, found {len(mats)}")
        parsed = []
        for a, rows in enumerate(mats):
            if len(rows) != m or any(len(row) != m for row in rows):
                raise ValueError(f"matrix {a} is not {m}x{m}")
            parsed.append(Mat.from_rows([[parse_rational(str(x)) for x in row] for row in rows]))
        if r == 0:
            return cls.zero(m, 0)
        return cls(parsed)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "r": self.r,
            "mats": [[[format_rational(x) for x in row] for row in self[a].to_rows()]
                     for a in range(self.r)],
        }

    def __getitem__(self, alpha: int) -> Mat:
        return Mat(self.num[alpha], self.den)

    def mats(self) -> list[Mat]:
        return [self[a] for a in range(self.r)]

    def at(self, z: Sequence) -> Mat:
        """``j_Z`` for ``Z = sum_alpha z[alpha] Z_alpha``."""
        if len(z) != self.r:
            raise DimensionError(f"Z has {len(z)} coordinates, expected {self.r}")
        coeffs, cden = common_scale(z)
        acc = np.zeros((self.m, self.m), dtype=object)
        acc[...] = 0
        for c, a in zip(coeffs, range(self.r)):
            if c:
                acc = acc + c * widen(self.num[a])
        return Mat(acc, self.den * cden)

    def is_integral(self) -> bool:
        return self.den == 1

    @cached_property
    def bigJ(self) -> Mat:
        """``J = sum_alpha j_{Z_alpha}^2``."""
        acc = np.zeros((self.m, self.m), dtype=object)
        acc[...] = 0
        for a in range(self.r):
            acc = acc + widen(exact_matmul(self.num[a], self.num[a]))
        return Mat(acc, self.den**2)

    def transformed(self, A: Mat, B: Mat) -> "JMap":
        """``((A, B) j)(Z) = A j_{B^{-1} Z} A^{-1}`` for orthogonal ``A``, ``B``."""
        if A.shape != (self.m, self.m) or B.shape != (self.r, self.r):
            raise DimensionError("A must be m x m and B r x r")
        mats = self.mats()
        out = []
        for a in range(self.r):
            # B^{-1} Z_a = sum_b B[a, b] Z_b since B^{-1} = B^T
            acc = Mat.zeros(self.m)
            for b in range(self.r):
                if B[a, b]:
                    acc = acc + mats[b].scale(B[a, b])
            out.append(A @ acc @ A.T)
        return JMap(out)

    def scaled(self, c) -> "JMap":
        c = as_fraction(c)
        return JMap(widen(self.num) * c.numerator, self.den * c.denominator)

    def __eq__(self, other) -> bool:
        if not isinstance(other, JMap):
            return NotImplemented
        return self.den == other.den and self.num.shape == other.num.shape and bool(
            np.all(self.num == other.num)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"JMap(m={self.m}, r={self.r}, den={self.den})"


@dataclass(frozen=True, eq=False)
class ConnectionCoefficients:
    """``gamma[A, B, C]``: coefficient of ``e_C`` in ``nabla_{e_A} e_B``."""

    gamma: FrameTensor

    @property
    def dim(self) -> int:
        return self.gamma.dim


class MetricLieAlgebra:
    """The metric Lie algebra ``g(j) = v + z`` with its left-invariant geometry.

    Tensors are cached on first use and never mutated afterwards.
    """

    def __init__(self, j: JMap, bracket: FrameTensor):
        self.j = j
        self.bracket = bracket

    @property
    def m(self) -> int:
        return self.j.m

    @property
    def r(self) -> int:
        return self.j.r

    @property
    def dim(self) -> int:
        return self.j.m + self.j.r

    @property
    def bigJ(self) -> Mat:
        return self.j.bigJ

    @cached_property
    def connection(self) -> ConnectionCoefficients:
        return connection(self)

    @cached_property
    def curvature(self) -> FrameTensor:
        return curvature_tensor(self)

    @cached_property
    def ricci(self) -> FrameTensor:
        return ricci(self)

    def __repr__(self) -> str:
        return f"MetricLieAlgebra(m={self.m}, r={self.r})"


def build_algebra(j: JMap) -> MetricLieAlgebra:
    """Bracket ``[X_k, X_l] = sum_alpha <j_{Z_alpha} X_k, X_l> Z_alpha``; z central."""
    m, r = j.m, j.r
    n = m + r
    br = np.zeros((n, n, n), dtype=j.num.dtype)
    # <j_a X_k, X_l> is row l, column k of j_a
    br[:m, :m, m:] = np.transpose(j.num, (2, 1, 0))
    return MetricLieAlgebra(j, FrameTensor(br, j.den, n))


def connection(alg: MetricLieAlgebra) -> ConnectionCoefficients:
    """Levi-Civita coefficients from the two-step block formulas.

    ``nabla_X Y = 1/2 [X, Y]``, ``nabla_X Z = nabla_Z X = -1/2 j_Z X``,
    ``nabla_Z W = 0``.
    """
    j, m, n = alg.j, alg.m, alg.dim
    g = np.zeros((n, n, n), dtype=j.num.dtype)
    jt = np.transpose(j.num, (2, 1, 0))  # jt[k, l, a] = j_a[l, k]
    g[:m, :m, m:] = jt
    # -1/2 j_a X_k = -1/2 sum_c j_a[c, k] X_c
    g[:m, m:, :m] = -np.transpose(j.num, (2, 0, 1))  # [k, a, c] = -j_a[c, k]
    g[m:, :m, :m] = -np.transpose(j.num, (0, 2, 1))  # [a, k, c] = -j_a[c, k]
    return ConnectionCoefficients(FrameTensor(g, 2 * j.den, n))


def koszul_connection(alg: MetricLieAlgebra) -> ConnectionCoefficients:
    """Levi-Civita coefficients from the Koszul formula on the bracket alone.

    ``<nabla_A B, C> = 1/2 (<[A,B],C> - <[B,C],A> + <[C,A],B>)``.
    """
    b = alg.bracket
    term = b + (-b.transpose((2, 0, 1))) + b.transpose((1, 2, 0))
    return ConnectionCoefficients(term.scale(Fraction(1, 2)))


def curvature_tensor(alg: MetricLieAlgebra) -> FrameTensor:
    """Curvature from the closed block formulas of the two-step setting."""
    j, m, r, n = alg.j, alg.m, alg.r, alg.dim
    J = j.num
    if 4 * max_abs(J) ** 2 * max(r, m) >= INT64_SAFE:
        J = widen(J)
    dt = object if J.dtype == object else np.int64
    R = np.zeros((n, n, n, n), dtype=dt)
    # <R(X,U)Y,V> * 4 = sum_a (j[y,u] j[v,x] - j[y,x] j[v,u] - 2 j[u,x] j[v,y])
    vvvv = (exact_einsum("ayu,avx->xuyv", J, J)
            - exact_einsum("ayx,avu->xuyv", J, J)
            - 2 * exact_einsum("aux,avy->xuyv", J, J))
    R[:m, :m, :m, :m] = vvvv
    # (j_Z j_W)[y, x] as prod[z, w, y, x]
    prod = exact_einsum("zyk,wkx->zwyx", J, J)
    # <R(X,Y)Z,W> = <R(Z,W)X,Y> = -1/4 ((j_Z j_W - j_W j_Z) X, Y)
    comm = prod - np.transpose(prod, (1, 0, 2, 3))
    xyzw = -np.transpose(comm, (3, 2, 0, 1))  # [x, y, z, w]
    R[:m, :m, m:, m:] = xyzw
    R[m:, m:, :m, :m] = np.transpose(xyzw, (2, 3, 0, 1))
    # <R(X,Z)Y,W> = -1/4 (j_Z j_W X, Y), plus the antisymmetric rearrangements
    xzyw = -np.transpose(prod, (3, 0, 2, 1))  # [x, z, y, w]
    R[:m, m:, :m, m:] = xzyw
    R[m:, :m, :m, m:] = -np.transpose(xzyw, (1, 0, 2, 3))
    R[:m, m:, m:, :m] = -np.transpose(xzyw, (0, 1, 3, 2))
    R[m:, :m, m:, :m] = np.transpose(xzyw, (1, 0, 3, 2))
    return FrameTensor(R, 4 * j.den**2, n)


def curvature_from_connection(conn: ConnectionCoefficients, bracket: FrameTensor) -> FrameTensor:
    """``<R(a,b)c,d>`` from ``R(A,B) = nabla_[A,B] - [nabla_A, nabla_B]``.

    Frame coefficients are constant, so ``nabla_a nabla_b e_c`` is
    ``sum_e G[b,c,e] G[a,e,d] e_d``.
    """
    G = conn.gamma
    first = einsum("abf,fcd->abcd", bracket, G)
    second = einsum("bce,aed->abcd", G, G)
    third = einsum("ace,bed->abcd", G, G)
    return first - second + third


def ricci(alg: MetricLieAlgebra) -> FrameTensor:
    """Ricci tensor from the closed formulas.

    ``ric(X,Y) = 1/2 <JX,Y>``, ``ric(X,Z) = 0``,
    ``ric(Z,W) = -1/4 Tr(j_Z j_W)``.
    """
    j, m, n = alg.j, alg.m, alg.dim
    out = np.zeros((n, n), dtype=object)
    out[...] = 0
    bigJ = alg.bigJ  # den j.den**2
    out[:m, :m] = widen(bigJ.num) * 2 * (j.den**2 // bigJ.den)
    tr = exact_einsum("aij,bji->ab", j.num, j.num)
    out[m:, m:] = -widen(tr)
    return FrameTensor(out, 4 * j.den**2, n)


def ricci_from_curvature(R: FrameTensor) -> FrameTensor:
    """``ric_jk = sum_i R_ijik``."""
    return einsum("ijik->jk", R)


def covariant_derivative(t: FrameTensor, conn: ConnectionCoefficients,
                         backend: str | None = None) -> FrameTensor:
    """``(nabla_A T)(B_1..B_k) = -sum_i T(B_1, .., nabla_A B_i, .., B_k)``.

    The derivative direction becomes slot 0.
    """
    if t.dim != conn.dim:
        raise DimensionError(f"tensor dim {t.dim} vs connection dim {conn.dim}")
    G = conn.gamma
    if t.arity == 0:
        return FrameTensor.zeros(t.dim, 1)
    out = kernels.covariant_derivative(t.num, G.num, backend=backend)
    return FrameTensor(out, t.den * G.den, t.dim)


def laplacian_trace(t: FrameTensor, conn: ConnectionCoefficients) -> FrameTensor:
    """``sum_p (nabla^2 T)[p, p, ...]`` without materialising ``nabla^2 T``.

    ``t`` is a first covariant derivative ``nabla S`` (slot 0 the direction);
    only the diagonal slice ``(nabla_p t)[p, ...]`` is formed for each ``p``.
    """
    if t.arity == 0:
        raise ValueError("laplacian_trace needs a derivative tensor")
    if t.dim != conn.dim:
        raise DimensionError(f"tensor dim {t.dim} vs connection dim {conn.dim}")
    G, T = conn.gamma.num, t.num
    n, k = t.dim, t.arity
    bound = max_abs(G) * max_abs(T) * n * k * n
    if bound >= INT64_SAFE or G.dtype == object or T.dtype == object:
        G, T = widen(G), widen(T)
    acc = np.zeros((n,) * (k - 1), dtype=T.dtype)
    for p in range(n):
        # slot 0 of t carries the direction p itself
        acc = acc - np.tensordot(G[p, p], T, axes=([0], [0]))
        sl = T[p]
        for i in range(k - 1):
            term = np.tensordot(G[p], sl, axes=([1], [i]))
            acc = acc - np.moveaxis(term, 0, i)
    return FrameTensor(acc, t.den * conn.gamma.den, n)


def gamma_lattice_closure_check(alg: MetricLieAlgebra) -> bool:
    """True iff every bracket of standard basis vectors of Z^m lies in Z^r."""
    return alg.bracket.den == 1
