"""numpy implementations of the hot kernels (no compiled code).

Both functions accept int64 or Python-int object arrays and are exact for
either; the caller picks the dtype.
"""
from __future__ import annotations

import string
from typing import Sequence

import numpy as np

_LETTERS = string.ascii_letters


def contract(nums: Sequence[np.ndarray], labels: Sequence[Sequence[int]]) -> int:
    terms = []
    for lab in labels:
        terms.append("".join(_LETTERS[k] for k in lab))
    out = np.einsum(",".join(terms) + "->", *nums, optimize=True)
    return int(out)


def covariant_derivative(num: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """``out[A, b...] = -sum_i sum_C gamma[A, b_i, C] * num[..C at slot i..]``."""
    arity = num.ndim
    dim = gamma.shape[0]
    dtype = object if (num.dtype == object or gamma.dtype == object) else np.int64
    out = np.zeros((dim,) * (arity + 1), dtype=dtype)
    # one direction at a time keeps the intermediate at the output's size
    for a in range(dim):
        for i in range(arity):
            # (b_i, rest...) -> put b_i back at position i
            term = np.tensordot(gamma[a], num, axes=([1], [i]))
            out[a] -= np.moveaxis(term, 0, i)
    return out
