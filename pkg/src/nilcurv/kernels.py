"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when it imports, unless the
environment variable ``NILCURV_PURE_PYTHON`` is set to a non-empty value other
than ``0``.  Every call checks an a-priori magnitude bound; when int64 could
overflow, the numpy path runs on Python-int object arrays instead, so results
are exact on both backends.
"""
from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from . import _pykernels
from .exact import INT64_SAFE, max_abs, shrink, widen

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

_FORCE_PURE = os.environ.get("NILCURV_PURE_PYTHON", "") not in ("", "0")

BACKEND = "cython" if (_ckernels is not None and not _FORCE_PURE) else "python"


def available_backends() -> list[str]:
    return ["cython", "python"] if _ckernels is not None else ["python"]


def _resolve(backend: str | None) -> str:
    backend = backend or BACKEND
    if backend == "cython" and _ckernels is None:
        raise RuntimeError("compiled kernels are not built")
    if backend not in ("cython", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def contract(nums: Sequence[np.ndarray], labels: Sequence[Sequence[int]], dim: int,
             backend: str | None = None) -> int:
    """Complete contraction of integer tensors.

    ``labels[t][s]`` names the summation index carried by slot ``s`` of
    tensor ``t``; every label occurs exactly twice overall and runs over
    ``range(dim)``.  Returns the exact integer sum.
    """
    backend = _resolve(backend)
    scalar = 1
    arrays, labs = [], []
    for arr, lab in zip(nums, labels):
        if arr.ndim == 0:
            scalar *= int(arr)
        else:
            arrays.append(arr)
            labs.append(list(lab))
    if not arrays:
        return scalar
    nlab = 1 + max(max(lab) for lab in labs)
    bound = dim**nlab
    for arr in arrays:
        bound *= max_abs(arr)
    if bound == 0:
        return 0
    fits = bound < INT64_SAFE and all(a.dtype != object for a in arrays)
    if not fits:
        return scalar * _pykernels.contract([widen(a) for a in arrays], labs)
    if backend == "python":
        return scalar * _pykernels.contract(arrays, labs)
    return scalar * _contract_compiled(arrays, labs, dim, nlab)


def _contract_compiled(arrays, labs, dim, nlab):
    # relabel so labels are assigned in order of first appearance
    order: dict[int, int] = {}
    for lab in labs:
        for l in lab:
            order.setdefault(l, len(order))
    labs = [[order[l] for l in lab] for lab in labs]
    coef = np.zeros((len(arrays), nlab), dtype=np.int64)
    done = []
    for t, (arr, lab) in enumerate(zip(arrays, labs)):
        strides = [dim ** (arr.ndim - 1 - s) for s in range(arr.ndim)]
        for s, l in enumerate(lab):
            coef[t, l] += strides[s]
        done.append(max(lab))
    dorder = np.array(sorted(range(len(arrays)), key=lambda t: done[t]), dtype=np.int64)
    dstart = np.zeros(nlab + 1, dtype=np.int64)
    for t in range(len(arrays)):
        dstart[done[t] + 1] += 1
    dstart = np.cumsum(dstart).astype(np.int64)
    datas = [np.ascontiguousarray(a, dtype=np.int64).ravel() for a in arrays]
    return int(_ckernels.contract_i64(datas, coef, dstart, dorder, dim))


def covariant_derivative(num: np.ndarray, gamma: np.ndarray,
                         backend: str | None = None) -> np.ndarray:
    """Integer part of the covariant derivative along a constant frame.

    ``gamma[A, B, C]`` is the coefficient of ``e_C`` in ``nabla_{e_A} e_B``;
    the result has the derivative direction as its new first slot.
    """
    backend = _resolve(backend)
    dim = gamma.shape[0]
    arity = num.ndim
    row_nnz = int(np.count_nonzero(gamma, axis=2).max()) if gamma.size else 0
    bound = max_abs(num) * max_abs(gamma) * max(arity, 1) * max(row_nnz, 1)
    fits = bound < INT64_SAFE and num.dtype != object and gamma.dtype != object
    if not fits:
        return shrink(_pykernels.covariant_derivative(widen(num), widen(gamma)))
    if backend == "python":
        return _pykernels.covariant_derivative(num, gamma)
    rowptr, cols, vals = _csr(gamma)
    flat = np.ascontiguousarray(num, dtype=np.int64).ravel()
    out = _ckernels.covderiv_i64(flat, dim, arity, rowptr, cols, vals)
    return out.reshape((dim,) * (arity + 1))


def _csr(gamma: np.ndarray):
    dim = gamma.shape[0]
    flat = gamma.reshape(dim * dim, dim)
    nz_rows, nz_cols = np.nonzero(flat)
    counts = np.bincount(nz_rows, minlength=dim * dim)
    rowptr = np.zeros(dim * dim + 1, dtype=np.int64)
    rowptr[1:] = np.cumsum(counts)
    vals = flat[nz_rows, nz_cols].astype(np.int64)
    return rowptr, nz_cols.astype(np.int64), vals
