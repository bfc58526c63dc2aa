"""Exact scalars and dense rational matrices.

Rationals are :class:`fractions.Fraction`.  Matrices and tensors are stored
as an integer numpy array together with one positive common denominator;
the integer part is ``int64`` whenever every intermediate value provably fits
and a Python-int ``object`` array otherwise, so no operation ever rounds.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

# Largest magnitude allowed for an int64 accumulation.
INT64_SAFE = 2**62

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class DimensionError(ValueError):
    """Raised when operand shapes do not fit together."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def parse_rational(s: str) -> Fraction:
    """Parse ``"n"`` or ``"p/q"``; floats and decimals are rejected."""
    mt = _RATIONAL_RE.match(s)
    if mt is None:
        raise ValueError(f"not a rational literal: {s!r}")
    den = int(mt.group(2)) if mt.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {s!r}")
    return Fraction(int(mt.group(1)), den)


def format_rational(x) -> str:
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# --------------------------------------------------------------------------
# integer-array helpers


def max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(np.abs(a).max())


def shrink(a: np.ndarray) -> np.ndarray:
    """Return ``a`` as int64 if all entries fit, else as an object array."""
    if a.dtype == object:
        if max_abs(a) < INT64_SAFE:
            return a.astype(np.int64)
        return a
    if a.dtype != np.int64:
        return a.astype(np.int64)
    return a


def widen(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def int_array(data) -> np.ndarray:
    a = np.array(data, dtype=object)
    return shrink(a)


def exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = a.shape[-1]
    if a.dtype != object and b.dtype != object:
        if max_abs(a) * max_abs(b) * max(k, 1) < INT64_SAFE:
            return a @ b
    return shrink(widen(a) @ widen(b))


def exact_einsum(subscripts: str, *arrays: np.ndarray) -> np.ndarray:
    """``np.einsum`` over integer arrays with an overflow guard.

    The bound is product of maxima times the number of summed terms, which
    also bounds every partial sum numpy forms along the way.
    """
    inputs, _, output = subscripts.partition("->")
    letters = set(inputs.replace(",", ""))
    summed = letters - set(output)
    sizes = {}
    for spec, arr in zip(inputs.split(","), arrays):
        for ch, n in zip(spec, arr.shape):
            sizes[ch] = n
    terms = math.prod(sizes[ch] for ch in summed) if summed else 1
    bound = terms
    for arr in arrays:
        bound *= max_abs(arr)
    if bound < INT64_SAFE and all(arr.dtype != object for arr in arrays):
        out = np.einsum(subscripts, *arrays, optimize=True)
        return np.asarray(out, dtype=np.int64)
    out = np.einsum(subscripts, *(widen(arr) for arr in arrays), optimize=True)
    return shrink(np.asarray(out, dtype=object))


def normalize(num: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    """Reduce ``num / den`` so that gcd(entries, den) == 1 and den > 0."""
    den = int(den)
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        num, den = -num, -den
    if den == 1:
        return num, 1
    if num.dtype == object:
        g = reduce(math.gcd, (int(v) for v in num.flat), den)
    else:
        g = math.gcd(int(np.gcd.reduce(num.ravel())) if num.size else 0, den)
    if g > 1:
        num = num // g
        den //= g
    return num, den


def common_scale(items: Iterable) -> tuple[list[int], int]:
    """Integer numerators over one common denominator for some rationals."""
    fr = [as_fraction(x) for x in items]
    den = reduce(math.lcm, (f.denominator for f in fr), 1)
    return [f.numerator * (den // f.denominator) for f in fr], den


# --------------------------------------------------------------------------
# matrices


class Mat:
    """Immutable dense rational matrix ``num / den``."""

    __slots__ = ("num", "den")

    def __init__(self, num, den: int = 1):
        num = shrink(np.array(num, dtype=object) if not isinstance(num, np.ndarray) else num)
        if num.ndim != 2:
            raise DimensionError(f"matrix data must be 2-d, got shape {num.shape}")
        num, den = normalize(num, den)
        num = num.copy()
        num.flags.writeable = False
        self.num = num
        self.den = den

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Mat":
        rows = [list(r) for r in rows]
        if len({len(r) for r in rows}) > 1:
            raise DimensionError("ragged rows")
        flat, den = common_scale(x for r in rows for x in r)
        ncols = len(rows[0]) if rows else 0
        data = np.array(flat, dtype=object).reshape(len(rows), ncols)
        return cls(data, den)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls(np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "Mat":
        return cls(np.zeros((rows, rows if cols is None else cols), dtype=np.int64))

    @classmethod
    def diag(cls, entries: Sequence) -> "Mat":
        n = len(entries)
        rows = [[entries[i] if i == k else 0 for k in range(n)] for i in range(n)]
        return cls.from_rows(rows)

    @property
    def rows(self) -> int:
        return self.num.shape[0]

    @property
    def cols(self) -> int:
        return self.num.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return Fraction(int(self.num[i, j]), self.den)

    def to_rows(self) -> list[list[Fraction]]:
        return [[Fraction(int(v), self.den) for v in row] for row in self.num]

    def to_float(self) -> np.ndarray:
        return np.array(self.num, dtype=float) / self.den

    @property
    def T(self) -> "Mat":
        return Mat(self.num.T, self.den)

    def __matmul__(self, other: "Mat") -> "Mat":
        return mat_mul(self, other)

    def _binary(self, other: "Mat", sign: int) -> "Mat":
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        den = math.lcm(self.den, other.den)
        a = widen(self.num) * (den // self.den)
        b = widen(other.num) * (den // other.den)
        return Mat(a + sign * b, den)

    def __add__(self, other: "Mat") -> "Mat":
        return self._binary(other, 1)

    def __sub__(self, other: "Mat") -> "Mat":
        return self._binary(other, -1)

    def __neg__(self) -> "Mat":
        return Mat(-self.num, self.den)

    def scale(self, c) -> "Mat":
        c = as_fraction(c)
        return Mat(widen(self.num) * c.numerator, self.den * c.denominator)

    def trace(self) -> Fraction:
        if self.rows != self.cols:
            raise DimensionError("trace of a non-square matrix")
        return Fraction(int(np.trace(widen(self.num))), self.den)

    def is_skew(self) -> bool:
        return self.rows == self.cols and bool(np.all(self.num == -self.num.T))

    def is_zero(self) -> bool:
        return not np.any(self.num)

    def power(self, q: int) -> "Mat":
        if self.rows != self.cols:
            raise DimensionError("power of a non-square matrix")
        out = Mat.identity(self.rows)
        for _ in range(q):
            out = out @ self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.den == other.den and self.shape == other.shape and bool(
            np.all(self.num == other.num)
        )

    def __hash__(self) -> int:
        return hash((self.den, self.shape, tuple(int(v) for v in self.num.flat)))

    def __repr__(self) -> str:
        body = [[format_rational(x) for x in row] for row in self.to_rows()]
        return f"Mat({body})"


def mat_mul(a: Mat, b: Mat) -> Mat:
    """Exact product ``a @ b``."""
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return Mat(exact_matmul(a.num, b.num), a.den * b.den)


def trace_product(ms: Sequence[Mat]) -> Fraction:
    """Exact ``Tr(m1 @ m2 @ ... @ mk)``."""
    if not ms:
        raise ValueError("trace_product needs at least one matrix")
    n = ms[0].rows
    for k, m in enumerate(ms):
        if m.rows != n or m.cols != n:
            raise DimensionError(f"factor {k} has shape {m.shape}, expected ({n}, {n})")
    if len(ms) == 1:
        return ms[0].trace()
    left = ms[0].num
    den = ms[0].den
    for m in ms[1:-1]:
        left = exact_matmul(left, m.num)
        den *= m.den
    last = ms[-1]
    # Tr(AB) = sum(A * B^T)
    total = int(np.sum(widen(left) * widen(last.num).T))
    return Fraction(total, den * last.den)


def cayley_orthogonal(skew: Mat) -> Mat:
    """Rational orthogonal matrix ``(I - S)(I + S)^{-1}`` for skew ``S``."""
    if not skew.is_skew():
        raise ValueError("Cayley transform needs a skew-symmetric matrix")
    n = skew.rows
    eye = Mat.identity(n)
    return (eye - skew) @ inverse(eye + skew)


def inverse(a: Mat) -> Mat:
    """Exact inverse by Gauss-Jordan elimination over the rationals."""
    if a.rows != a.cols:
        raise DimensionError("inverse of a non-square matrix")
    n = a.rows
    aug = [row + [Fraction(int(i == k)) for k in range(n)] for i, row in enumerate(a.to_rows())]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return Mat.from_rows([row[n:] for row in aug])


def charpoly(a: Mat) -> list[Fraction]:
    """Coefficients ``[1, c_1, ..., c_n]`` of ``det(x I - a)``, highest degree first.

    Faddeev-LeVerrier recursion over Python integers: with ``a = N / d`` the
    scaled matrices ``d**k M_k`` stay integral, so only the final
    coefficients carry denominators.
    """
    if a.rows != a.cols:
        raise DimensionError("characteristic polynomial of a non-square matrix")
    n = a.rows
    N = widen(a.num)
    d = a.den
    eye = np.eye(n, dtype=np.int64).astype(object)
    coeffs = [Fraction(1)]
    # S_k = d**(k-1) * M_k, with M_1 = I
    S = eye
    for k in range(1, n + 1):
        AS = N @ S  # d**k * A M_k
        ck = Fraction(-int(np.trace(AS)), k * d**k)
        coeffs.append(ck)
        if k < n:
            # M_{k+1} = A M_k + c_k I  ->  S_{k+1} = AS + d**k c_k I
            # d**k c_k is a coefficient of the integer matrix N, hence integral
            scaled = ck * d**k
            S = AS + eye * scaled.numerator
    return coeffs

