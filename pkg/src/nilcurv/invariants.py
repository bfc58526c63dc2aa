"""Curvature invariants of order two, four and six, and heat-invariant integrands.

Two independent routes produce values:

* ``oracle_invariants`` contracts the curvature tensor, the Ricci tensor and
  their covariant derivatives directly in the orthonormal frame;
* ``closed_form_invariants`` evaluates the trace-invariant formulas in ``j``.

An :class:`InvariantReport` refuses to hold two different values for one id.
Sign conventions: ``Delta = -div grad``, so ``<Delta ric, ric>`` is
``-ric_ij nabla^2_kk ric_ij`` and ``<Delta R, R>`` is ``-R_ijkl nabla^2_pp R_ijkl``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from . import traceinv
from .liealg import (
    JMap,
    MetricLieAlgebra,
    build_algebra,
    covariant_derivative,
    laplacian_trace,
)
from .tensor import FrameTensor, trace_word

ORACLE = "tensor-oracle"
CLOSED = "closed-form"

INVARIANT_IDS: tuple[str, ...] = (
    "scal", "scal2", "scal3", "ric2", "R2", "scal_ric2", "scal_R2", "trRic3",
    "star", "starstar", "Rhat", "Rcirc", "grad_scal2", "grad_ric2", "grad_R2",
    "threestar", "scal_lap_scal", "lap2_scal", "lap_ric_ric", "hess_scal_ric",
    "lap_R_R", "a1", "a2", "a3",
)

ORDER: dict[str, int] = {
    "scal": 2, "a1": 2,
    "scal2": 4, "ric2": 4, "R2": 4, "a2": 4,
}
ORDER.update({k: 6 for k in INVARIANT_IDS if k not in ORDER})

# need the second covariant derivative of a tensor
HEAVY_IDS = frozenset({"scal_lap_scal", "lap2_scal", "lap_ric_ric", "hess_scal_ric", "lap_R_R"})
# scal is constant on a homogeneous space; these must come out as zero
CONSTANT_SCAL_IDS = ("grad_scal2", "scal_lap_scal", "lap2_scal", "hess_scal_ric")

DEFAULT_HEAVY_DIM_LIMIT = 12

A3_COEFFS: dict[str, int] = {
    "grad_scal2": -142, "grad_ric2": -26, "grad_R2": -7, "scal3": 35,
    "scal_ric2": -42, "scal_R2": 42, "trRic3": -36, "star": 20,
    "starstar": -8, "Rhat": 24,
}


class ResourceLimitError(RuntimeError):
    """The requested computation exceeds the configured dimension limit."""


class InconsistentValueError(ValueError):
    """Two sources disagree on the value of one invariant."""


class HomogeneityError(AssertionError):
    """An invariant that must vanish on a homogeneous space did not."""


class MissingInvariantError(KeyError):
    pass


@dataclass
class InvariantReport:
    manifold: str
    values: dict[str, Fraction] = field(default_factory=dict)
    provenance: dict[str, set[str]] = field(default_factory=dict)
    skipped: list[str] = field(default_factory=list)

    def add(self, key: str, value, source: str) -> None:
        value = Fraction(value)
        old = self.values.get(key)
        if old is not None and old != value:
            raise InconsistentValueError(
                f"{self.manifold}: {key} is {old} from {sorted(self.provenance[key])} "
                f"but {value} from {source}"
            )
        self.values[key] = value
        self.provenance.setdefault(key, set()).add(source)

    def merge(self, other: "InvariantReport") -> "InvariantReport":
        out = InvariantReport(self.manifold)
        for rep in (self, other):
            for key, v in rep.values.items():
                for src in sorted(rep.provenance[key]):
                    out.add(key, v, src)
        out.skipped = sorted((set(self.skipped) | set(other.skipped)) - set(out.values))
        return out

    def __getitem__(self, key: str) -> Fraction:
        try:
            return self.values[key]
        except KeyError:
            raise MissingInvariantError(key) from None

    def __contains__(self, key: str) -> bool:
        return key in self.values

    def ordered(self) -> list[tuple[str, Fraction]]:
        rank = {k: i for i, k in enumerate(INVARIANT_IDS)}
        return sorted(self.values.items(), key=lambda kv: (rank.get(kv[0], len(rank)), kv[0]))

    def filter_order(self, max_order: int) -> "InvariantReport":
        out = InvariantReport(self.manifold, skipped=list(self.skipped))
        for key, v in self.values.items():
            if ORDER.get(key, 6) <= max_order:
                out.values[key] = v
                out.provenance[key] = set(self.provenance[key])
        return out


class TensorCache:
    """Frame tensors of one algebra, each built on first use."""

    def __init__(self, alg: MetricLieAlgebra, backend: str | None = None):
        self.alg = alg
        self.backend = backend

    @property
    def dim(self) -> int:
        return self.alg.dim

    @property
    def conn(self):
        return self.alg.connection

    @cached_property
    def R(self) -> FrameTensor:
        return self.alg.curvature

    @cached_property
    def ric(self) -> FrameTensor:
        return self.alg.ricci

    @cached_property
    def dR(self) -> FrameTensor:
        return covariant_derivative(self.R, self.conn, backend=self.backend)

    @cached_property
    def dric(self) -> FrameTensor:
        return covariant_derivative(self.ric, self.conn, backend=self.backend)

    @cached_property
    def d2ric(self) -> FrameTensor:
        return covariant_derivative(self.dric, self.conn, backend=self.backend)

    @cached_property
    def rough_lap_ric(self) -> FrameTensor:
        """``sum_p nabla^2_pp ric``."""
        return laplacian_trace(self.dric, self.conn)

    @cached_property
    def rough_lap_R(self) -> FrameTensor:
        return laplacian_trace(self.dR, self.conn)

    @cached_property
    def rough_lap2_ric(self) -> FrameTensor:
        inner = covariant_derivative(self.rough_lap_ric, self.conn, backend=self.backend)
        return laplacian_trace(inner, self.conn)

    def trace(self, word: str, *tensors: FrameTensor) -> Fraction:
        return trace_word(word, *tensors, backend=self.backend)


def _heavy_allowed(dim: int, heavy: str, limit: int) -> bool:
    if heavy not in ("auto", "include", "skip"):
        raise ValueError(f"heavy must be auto, include or skip, got {heavy!r}")
    if heavy == "skip":
        return False
    if dim <= limit:
        return True
    if heavy == "include":
        raise ResourceLimitError(
            f"second covariant derivatives requested at dimension {dim} "
            f"above the limit {limit}"
        )
    return False


def oracle_invariants(alg: MetricLieAlgebra, manifold: str = "", *, heavy: str = "auto",
                      heavy_dim_limit: int = DEFAULT_HEAVY_DIM_LIMIT,
                      cache: TensorCache | None = None,
                      max_order: int = 6) -> InvariantReport:
    """Every invariant by complete contraction of frame tensors.

    ``heavy`` controls the Delta-type ids: ``"auto"`` computes them up to
    ``heavy_dim_limit`` and lists them as skipped above it, ``"include"``
    raises :class:`ResourceLimitError` above the limit, ``"skip"`` omits them.
    """
    c = cache or TensorCache(alg)
    rep = InvariantReport(manifold)
    R, ric = c.R, c.ric
    put = lambda k, v: rep.add(k, v, ORACLE)  # noqa: E731

    put("scal", c.trace("aa", ric))
    if max_order >= 4:
        put("scal2", c.trace("aabb", ric, ric))
        put("ric2", c.trace("abab", ric, ric))
        put("R2", c.trace("abcdabcd", R, R))
    if max_order >= 6:
        put("scal3", c.trace("aabbcc", ric, ric, ric))
        put("scal_ric2", c.trace("aabcbc", ric, ric, ric))
        put("scal_R2", c.trace("aabcdebcde", ric, R, R))
        put("trRic3", c.trace("abbcca", ric, ric, ric))
        put("star", c.trace("ikjlijkl", ric, ric, R))
        put("starstar", c.trace("ijipqrjpqr", ric, R, R))
        put("Rhat", c.trace("ijklklpqpqij", R, R, R))
        put("Rcirc", c.trace("ikjlkplqpiqj", R, R, R))
        dric = c.dric
        put("grad_scal2", c.trace("aiiajj", dric, dric))
        put("grad_ric2", c.trace("abcabc", dric, dric))
        put("grad_R2", c.trace("abcdeabcde", c.dR, c.dR))
        put("threestar", c.trace("ijkkij", dric, dric))
        if _heavy_allowed(alg.dim, heavy, heavy_dim_limit):
            lap_ric = c.rough_lap_ric
            put("scal_lap_scal", -c.trace("aabb", ric, lap_ric))
            put("lap2_scal", c.trace("aa", c.rough_lap2_ric))
            put("lap_ric_ric", -c.trace("ijij", ric, lap_ric))
            put("hess_scal_ric", c.trace("ijkkij", c.d2ric, ric))
            put("lap_R_R", -c.trace("ijklijkl", R, c.rough_lap_R))
        else:
            rep.skipped.extend(sorted(HEAVY_IDS))
    for key in CONSTANT_SCAL_IDS:
        if key in rep and rep[key] != 0:
            raise HomogeneityError(f"{manifold}: {key} = {rep[key]} but scal is constant")
    _add_heat(rep, ORACLE)
    return rep


def closed_form_invariants(j: JMap, manifold: str = "") -> InvariantReport:
    """The lemma formulas in terms of trace invariants of ``j``."""
    I = traceinv.eval_named_basics(j)
    F = Fraction
    rep = InvariantReport(manifold)
    put = lambda k, v: rep.add(k, v, CLOSED)  # noqa: E731
    put("scal", F(1, 4) * I["I_aa"])
    put("scal2", F(1, 16) * I["I_aa|bb"])
    put("ric2", F(1, 4) * I["I_aabb"] + F(1, 16) * I["I_ab|ab"])
    put("R2", F(1, 2) * I["I_aabb"] + F(3, 8) * I["I_ab|ab"] + F(1, 8) * I["I_abab"])
    # the v/z mixed block of ric_ik ric_jl R_ijkl contributes I_{aabc|bc} / 16
    put("star", F(3, 16) * I["I_aabccb"] + F(1, 16) * I["I_aabc|bc"])
    put("starstar", F(1, 8) * (I["I_aabccb"] + I["I_aabcbc"] + I["I_aabc|bc"])
        + F(1, 32) * I["I_acbc|ab"])
    put("grad_ric2", -F(1, 4) * I["I_aabbcc"] + F(1, 8) * I["I_aabccb"]
        - F(1, 8) * I["I_aabc|bc"] - F(1, 32) * I["I_ac|bc|ab"])
    # v-block (J/2) and z-block (-Tr(j_a j_b)/4) of the Ricci tensor
    put("trRic3", F(1, 8) * I["I_aabbcc"] - F(1, 64) * I["I_ab|bc|ca"])
    _add_heat(rep, CLOSED)
    return rep


PRINTED_ERRATA = {
    "star": "the quoted form omits the mixed-block term I_aabc|bc / 16",
}


def printed_lemma_values(j: JMap) -> dict[str, Fraction]:
    """The order-2/4/6 lemma formulas exactly as usually quoted.

    Identical to :func:`closed_form_invariants` except for ``star``, which
    is quoted there as ``3/16 I_{aabccb}`` without the mixed-block term.
    """
    I = traceinv.eval_named_basics(j)
    out = {k: v for k, v in closed_form_invariants(j).values.items()
           if k in ("scal", "scal2", "ric2", "R2", "starstar", "grad_ric2")}
    out["star"] = Fraction(3, 16) * I["I_aabccb"]
    return out


def heat_integrands(report: InvariantReport | Mapping[str, Fraction]) -> tuple[Fraction, Fraction, Fraction]:
    """Pointwise integrands of ``a1``, ``a2``, ``a3``."""
    v = report.values if isinstance(report, InvariantReport) else report
    need = {"scal", "scal2", "ric2", "R2", *A3_COEFFS}
    missing = sorted(k for k in need if k not in v)
    if missing:
        raise MissingInvariantError(f"missing constituents {missing}")
    return _a1(v), _a2(v), _a3(v)


def _a1(v):
    return Fraction(v["scal"]) / 6


def _a2(v):
    return (5 * v["scal2"] - 2 * v["ric2"] + 2 * v["R2"]) / Fraction(360)


def _a3(v):
    return sum(c * v[k] for k, c in A3_COEFFS.items()) / Fraction(45360)


def _add_heat(rep: InvariantReport, source: str) -> None:
    v = rep.values
    if "scal" in v:
        rep.add("a1", _a1(v), source)
    if all(k in v for k in ("scal2", "ric2", "R2")):
        rep.add("a2", _a2(v), source)
    if all(k in v for k in A3_COEFFS):
        rep.add("a3", _a3(v), source)


def full_report(j: JMap, manifold: str = "", **kw) -> InvariantReport:
    """Oracle and closed-form values merged; agreement is enforced."""
    alg = build_algebra(j)
    oracle = oracle_invariants(alg, manifold, **kw)
    return oracle.merge(closed_form_invariants(j, manifold))


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    passed: bool
    lhs: Fraction
    rhs: Fraction


def verify_identities(j: JMap, manifold: str = "", *, heavy: str = "auto",
                      heavy_dim_limit: int = DEFAULT_HEAVY_DIM_LIMIT) -> list[IdentityCheck]:
    """Pointwise forms of the integral identities, plus closed form vs oracle.

    Checks whose inputs were skipped for size are left out of the result.
    """
    alg = build_algebra(j)
    try:
        o = oracle_invariants(alg, manifold, heavy=heavy, heavy_dim_limit=heavy_dim_limit)
    except HomogeneityError as exc:
        return [IdentityCheck(f"constant_scal: {exc}", False, Fraction(0), Fraction(0))]
    cf = closed_form_invariants(j, manifold)
    v = o.values
    out: list[IdentityCheck] = []

    def check(name, lhs, rhs):
        out.append(IdentityCheck(name, lhs == rhs, Fraction(lhs), Fraction(rhs)))

    check("threestar", v["threestar"],
          Fraction(1, 4) * v["grad_scal2"] - v["trRic3"] + v["star"])
    check("Rcirc", v["Rcirc"],
          Fraction(1, 4) * v["grad_scal2"] - v["grad_ric2"] + Fraction(1, 4) * v["grad_R2"]
          - v["trRic3"] + v["star"] + Fraction(1, 2) * v["starstar"] - Fraction(1, 4) * v["Rhat"])
    if "lap_ric_ric" in v:
        check("lap_ric_ric", v["lap_ric_ric"], v["grad_ric2"])
        check("lap_R_R", v["lap_R_R"], v["grad_R2"])
        check("hess_scal_ric", v["hess_scal_ric"], 0)
        check("scal_lap_scal", v["scal_lap_scal"], v["grad_scal2"])
        check("lap2_scal", v["lap2_scal"], 0)
    check("grad_scal2", v["grad_scal2"], 0)
    for key, val in cf.values.items():
        check(f"closed_form:{key}", val, v[key])
    return out


def nablar_structure_check(j: JMap, jp: JMap) -> dict:
    """Differences of ``|nabla R|^2``, ``R-hat`` and ``R-circ`` across a Heisenberg-type pair.

    They must be ``-3/2``, ``-7/16`` and ``-17/64`` times the difference of
    ``I_{abc|abc}``: the remaining terms depend only on invariants that are
    functions of ``(m, r)`` for Heisenberg-type maps.
    """
    from .heisenberg import PreconditionError, is_heisenberg_type

    for name, x in (("first", j), ("second", jp)):
        ok, witness = is_heisenberg_type(x)
        if not ok:
            raise PreconditionError(f"{name} map is not of Heisenberg type: {witness}")
    if (j.m, j.r) != (jp.m, jp.r):
        raise PreconditionError(f"(m, r) differ: {(j.m, j.r)} vs {(jp.m, jp.r)}")
    d_I = traceinv.eval_trace_invariant("abc|abc", j) - traceinv.eval_trace_invariant("abc|abc", jp)
    reps = []
    for x in (j, jp):
        c = TensorCache(build_algebra(x))
        R = c.R
        reps.append({
            "grad_R2": c.trace("abcdeabcde", c.dR, c.dR),
            "Rhat": c.trace("ijklklpqpqij", R, R, R),
            "Rcirc": c.trace("ikjlkplqpiqj", R, R, R),
        })
    coeff = {"grad_R2": Fraction(-3, 2), "Rhat": Fraction(-7, 16), "Rcirc": Fraction(-17, 64)}
    checks = {}
    for key, cf in coeff.items():
        delta = reps[0][key] - reps[1][key]
        checks[key] = {"delta": delta, "expected": cf * d_I, "passed": delta == cf * d_I}
    return {"delta_I_abc|abc": d_I, "checks": checks,
            "passed": all(ch["passed"] for ch in checks.values())}


def compare_reports(a: InvariantReport, b: InvariantReport) -> dict[str, dict]:
    """Per-id values of both sides and their exact difference."""
    out = {}
    for key in INVARIANT_IDS:
        if key in a and key in b:
            d = a[key] - b[key]
            out[key] = {"first": a[key], "second": b[key], "delta": d, "differs": d != 0}
    return out


def ids_for_order(max_order: int) -> Iterable[str]:
    return [k for k in INVARIANT_IDS if ORDER[k] <= max_order]
