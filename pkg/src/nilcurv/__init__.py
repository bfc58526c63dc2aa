"""Exact curvature invariants of Riemannian two-step nilmanifolds.

A two-step nilpotent metric Lie algebra is encoded by a linear map
``j: z -> so(v)``.  This package builds its curvature tensors exactly over
the rationals, evaluates trace invariants and heat-invariant integrands, and
checks the hypotheses of the Gordon-Wilson isospectrality criterion.
"""
from .exact import Mat, mat_mul, trace_product
from .kernels import BACKEND
from .liealg import JMap, MetricLieAlgebra, build_algebra
from .tensor import FrameTensor, Pairing, complete_trace

__all__ = [
    "BACKEND",
    "FrameTensor",
    "JMap",
    "Mat",
    "MetricLieAlgebra",
    "Pairing",
    "build_algebra",
    "complete_trace",
    "mat_mul",
    "trace_product",
]

__version__ = "0.1.0"
