"""Multi-index tensors in a fixed orthonormal frame and complete traces."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import kernels
from .exact import (
    INT64_SAFE,
    DimensionError,
    max_abs,
    as_fraction,
    common_scale,
    exact_einsum,
    normalize,
    shrink,
    widen,
)


class FrameTensor:
    """Rational tensor ``num / den`` with every slot running over ``range(dim)``.

    Frame indices ``0..m-1`` are the vectors of ``v`` and ``m..m+r-1`` those
    of the center ``z``.
    """

    __slots__ = ("num", "den", "dim")

    def __init__(self, num: np.ndarray, den: int = 1, dim: int | None = None):
        num = shrink(np.asarray(num))
        if dim is None:
            if num.ndim == 0:
                raise ValueError("dim is required for a scalar tensor")
            dim = num.shape[0]
        if any(n != dim for n in num.shape):
            raise DimensionError(f"tensor shape {num.shape} is not a cube of side {dim}")
        num, den = normalize(num, den)
        num = np.array(num, copy=True)
        num.flags.writeable = False
        self.num = num
        self.den = den
        self.dim = dim

    @classmethod
    def zeros(cls, dim: int, arity: int) -> "FrameTensor":
        return cls(np.zeros((dim,) * arity, dtype=np.int64), 1, dim)

    @classmethod
    def metric(cls, dim: int) -> "FrameTensor":
        return cls(np.eye(dim, dtype=np.int64), 1, dim)

    @classmethod
    def from_sparse(cls, dim: int, arity: int, entries: Mapping[tuple, object]) -> "FrameTensor":
        nums, den = common_scale(entries.values())
        data = np.zeros((dim,) * arity, dtype=object)
        data[...] = 0
        for key, v in zip(entries, nums):
            data[tuple(key)] = v
        return cls(data, den, dim)

    @property
    def arity(self) -> int:
        return self.num.ndim

    def component(self, *idx: int) -> Fraction:
        return Fraction(int(self.num[idx]), self.den)

    def items(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        """Nonzero components as ``(index tuple, value)`` pairs."""
        for key in zip(*np.nonzero(self.num)):
            key = tuple(int(k) for k in key)
            yield key, Fraction(int(self.num[key]), self.den)

    def nnz(self) -> int:
        return int(np.count_nonzero(self.num))

    def is_zero(self) -> bool:
        return not np.any(self.num)

    def transpose(self, axes: Sequence[int]) -> "FrameTensor":
        return FrameTensor(np.transpose(self.num, axes), self.den, self.dim)

    def scale(self, c) -> "FrameTensor":
        c = as_fraction(c)
        return FrameTensor(widen(self.num) * c.numerator, self.den * c.denominator, self.dim)

    def _combine(self, other: "FrameTensor", sign: int) -> "FrameTensor":
        if self.num.shape != other.num.shape:
            raise DimensionError(f"shape mismatch {self.num.shape} vs {other.num.shape}")
        den = math.lcm(self.den, other.den)
        a, b = self.num, other.num
        fa, fb = den // self.den, den // other.den
        if max_abs(a) * fa + max_abs(b) * fb >= INT64_SAFE:
            a, b = widen(a), widen(b)
        return FrameTensor(a * fa + sign * (b * fb), den, self.dim)

    def __add__(self, other: "FrameTensor") -> "FrameTensor":
        return self._combine(other, 1)

    def __sub__(self, other: "FrameTensor") -> "FrameTensor":
        return self._combine(other, -1)

    def __neg__(self) -> "FrameTensor":
        return FrameTensor(-self.num, self.den, self.dim)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrameTensor):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.den == other.den
            and self.num.shape == other.num.shape
            and bool(np.all(self.num == other.num))
        )

    __hash__ = None

    def to_float(self) -> np.ndarray:
        return np.asarray(self.num, dtype=float) / self.den

    def __repr__(self) -> str:
        return f"FrameTensor(arity={self.arity}, dim={self.dim}, den={self.den}, nnz={self.nnz()})"


def einsum(subscripts: str, *tensors: FrameTensor) -> FrameTensor | Fraction:
    """Exact partial or complete contraction written as an einsum string."""
    if not tensors:
        raise ValueError("einsum needs at least one tensor")
    dim = tensors[0].dim
    out = exact_einsum(subscripts, *(t.num for t in tensors))
    den = math.prod(t.den for t in tensors)
    if np.ndim(out) == 0:
        return Fraction(int(out), den)
    return FrameTensor(out, den, dim)


@dataclass(frozen=True)
class Pairing:
    """A perfect matching of ``slots`` tensor slots into index pairs."""

    slots: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.slots % 2:
            raise ValueError(f"odd slot count {self.slots}")
        seen = [s for p in self.pairs for s in p]
        if sorted(seen) != list(range(self.slots)):
            raise ValueError("pairs must cover every slot exactly once")
        if any(len(p) != 2 for p in self.pairs):
            raise ValueError("each pair must hold two slots")

    @classmethod
    def from_word(cls, word: str) -> "Pairing":
        """Build from per-slot labels, e.g. ``"ijkl ijkl"`` for |R|^2.

        Whitespace is cosmetic; every other character labels one slot and
        must occur exactly twice.
        """
        chars = [c for c in word if not c.isspace()]
        where: dict[str, list[int]] = {}
        for pos, c in enumerate(chars):
            where.setdefault(c, []).append(pos)
        bad = [c for c, pos in where.items() if len(pos) != 2]
        if bad:
            raise ValueError(f"labels {bad} do not occur exactly twice in {word!r}")
        return cls(len(chars), tuple(tuple(p) for p in where.values()))

    def slot_labels(self) -> list[int]:
        lab = [0] * self.slots
        for k, (a, b) in enumerate(self.pairs):
            lab[a] = lab[b] = k
        return lab


def complete_trace(tensors: Sequence[FrameTensor], pairing: Pairing,
                   backend: str | None = None) -> Fraction:
    """Sum over paired-equal index assignments of the product of components."""
    total_slots = sum(t.arity for t in tensors)
    if total_slots != pairing.slots:
        raise DimensionError(
            f"tensors carry {total_slots} slots but the pairing has {pairing.slots}"
        )
    if not tensors:
        return Fraction(1)
    dims = {t.dim for t in tensors}
    if len(dims) != 1:
        raise DimensionError(f"tensors live in different dimensions {sorted(dims)}")
    dim = dims.pop()
    lab = pairing.slot_labels()
    labels, pos = [], 0
    for t in tensors:
        labels.append(lab[pos:pos + t.arity])
        pos += t.arity
    total = kernels.contract([t.num for t in tensors], labels, dim, backend=backend)
    return Fraction(total, math.prod(t.den for t in tensors))


def trace_word(word: str, *tensors: FrameTensor, backend: str | None = None) -> Fraction:
    """``complete_trace`` with the pairing given as per-slot labels."""
    return complete_trace(tensors, Pairing.from_word(word), backend=backend)
