# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled int64 kernels: complete-trace contraction and covariant derivative.

Callers (``nilcurv.kernels``) guarantee that no accumulation can exceed
2**62 in magnitude, so plain ``long long`` arithmetic is exact here.
"""
from libc.stdlib cimport malloc, free
import numpy as np


def contract_i64(list datas, const long long[:, ::1] coef,
                 const long long[::1] dstart, const long long[::1] dorder,
                 Py_ssize_t dim):
    """Sum over all label assignments of the product of tensor entries.

    ``coef[t, l]`` is the flat-offset stride contributed by label ``l`` to
    tensor ``t``.  Labels are assigned in order 0..N-1; tensors
    ``dorder[dstart[d]:dstart[d+1]]`` become fully indexed at depth ``d`` and
    are multiplied in there, pruning the subtree on a zero factor.
    """
    cdef Py_ssize_t ntens = len(datas)
    cdef Py_ssize_t nlab = coef.shape[1]
    cdef Py_ssize_t t, d, e, l
    cdef long long off, v, p, total = 0
    cdef const long long[::1] mv
    if nlab == 0:
        return 0
    cdef const long long** ptr = <const long long**> malloc(ntens * sizeof(long long*))
    cdef long long* idx = <long long*> malloc(nlab * sizeof(long long))
    cdef long long* prod = <long long*> malloc((nlab + 1) * sizeof(long long))
    try:
        for t in range(ntens):
            mv = datas[t]
            ptr[t] = &mv[0]
        prod[0] = 1
        d = 0
        idx[0] = -1
        while d >= 0:
            idx[d] += 1
            if idx[d] == dim:
                d -= 1
                continue
            p = prod[d]
            for e in range(dstart[d], dstart[d + 1]):
                t = dorder[e]
                off = 0
                for l in range(d + 1):
                    off += coef[t, l] * idx[l]
                v = ptr[t][off]
                if v == 0:
                    p = 0
                    break
                p *= v
            if p == 0:
                continue
            if d == nlab - 1:
                total += p
            else:
                prod[d + 1] = p
                d += 1
                idx[d] = -1
    finally:
        free(ptr)
        free(idx)
        free(prod)
    return total


def covderiv_i64(const long long[::1] src, Py_ssize_t dim, int arity,
                 const long long[::1] rowptr, const long long[::1] cols,
                 const long long[::1] vals):
    """``out[A, b...] = -sum_i sum_C G[A, b_i, C] * src[b... with b_i -> C]``.

    The connection ``G`` is given in CSR form over the row key ``A*dim + B``.
    """
    cdef Py_ssize_t tail = 1
    cdef int i
    for i in range(arity):
        tail *= dim
    out_arr = np.zeros(dim * tail, dtype=np.int64)
    cdef long long[::1] out = out_arr
    if arity == 0:
        return out_arr
    cdef long long* digit = <long long*> malloc(arity * sizeof(long long))
    cdef long long* stride = <long long*> malloc(arity * sizeof(long long))
    cdef Py_ssize_t a, flat, e, rp
    cdef long long acc, b
    try:
        stride[arity - 1] = 1
        for i in range(arity - 2, -1, -1):
            stride[i] = stride[i + 1] * dim
        for a in range(dim):
            for i in range(arity):
                digit[i] = 0
            for flat in range(tail):
                acc = 0
                for i in range(arity):
                    b = digit[i]
                    rp = a * dim + b
                    for e in range(rowptr[rp], rowptr[rp + 1]):
                        acc += vals[e] * src[flat + (cols[e] - b) * stride[i]]
                out[a * tail + flat] = -acc
                # odometer increment of the multi-index
                i = arity - 1
                while i >= 0:
                    digit[i] += 1
                    if digit[i] < dim:
                        break
                    digit[i] = 0
                    i -= 1
    finally:
        free(digit)
        free(stride)
    return out_arr
