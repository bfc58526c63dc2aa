"""The nine acceptance criteria.

Each test records a PASS/FAIL line (printed in the terminal summary) and then
asserts.  Nothing here is relaxed to make a criterion pass: where a published
value disagrees with what the published matrices give, the criterion fails
and the detail line says why.
"""
import itertools
from fractions import Fraction
from pathlib import Path

from nilcurv import catalog
from nilcurv.exact import Mat, cayley_orthogonal, charpoly
from nilcurv.heisenberg import (
    curvature_fingerprint,
    is_heisenberg_type,
    wedge_operator,
    wedge_trace_formula,
)
from nilcurv.invariants import (
    HEAVY_IDS,
    compare_reports,
    full_report,
    heat_integrands,
    oracle_invariants,
    printed_lemma_values,
    verify_identities,
)
from nilcurv.isospec import gordon_wilson_check, jmap_isospectral
from nilcurv.liealg import build_algebra, covariant_derivative
from nilcurv.traceinv import NAMED_SPECS, eval_trace_invariant

from conftest import ACCEPTANCE, SMALL_IDS

F = Fraction
ROOT = Path(__file__).resolve().parent.parent
ISO_PAIRS = ("fourthree", "fivethree", "sixtwo", "heis3", "heis7")


def record(n: int, failures: list[str], ok_detail: str) -> None:
    ok = not failures
    detail = ok_detail if ok else "; ".join(failures)
    ACCEPTANCE[n] = (ok, detail)
    print(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_1_golden_values():
    fails = []

    def expect(label, got, want):
        if got != want:
            fails.append(f"{label}: got {got}, published {want}")

    for eid, tr3, diag in (("fourthree", -2376, (-12, -6, -6, -6)),
                           ("fourthree-prime", -2214, (-3, -9, -9, -9))):
        J = catalog.get(eid).j.bigJ
        expect(f"{eid} Tr J^3", J.power(3).trace(), tr3)
        expect(f"{eid} J", J, Mat.diag(diag))
    for eid, diag, iv in (("fivethree", (-2, -2, -1, -1, -2), -24),
                          ("fivethree-prime", (-1, -1, -2, -2, -2), -26)):
        j = catalog.get(eid).j
        expect(f"{eid} J", j.bigJ, Mat.diag(diag))
        expect(f"{eid} I_aabccb", eval_trace_invariant("aabccb", j), iv)
        expect(f"{eid} Tr J", j.bigJ.trace(), -8)
        expect(f"{eid} Tr J^2", j.bigJ.power(2).trace(), 14)
    for eid, tr2 in (("sixtwo", 630), ("sixtwo-prime", 598)):
        j = catalog.get(eid).j
        expect(f"{eid} Tr J^2", j.bigJ.power(2).trace(), tr2)
        # the printed polynomial identity, checked on a grid that determines
        # every coefficient (degree <= 6 in Z, 9 points per axis)
        bad = [z for z in itertools.product(range(-4, 5), repeat=2)
               if tuple(charpoly(j.at(z))) != catalog.sixtwo_charpoly(*z)]
        if bad:
            z = min(bad, key=lambda p: (abs(p[0]) + abs(p[1]), p))
            got = charpoly(j.at(z))[4]
            fails.append(f"{eid} printed charpoly fails at {len(bad)}/81 grid points, "
                         f"e.g. Z={z}: lambda^2 coefficient {got} vs printed "
                         f"{catalog.sixtwo_charpoly(*z)[4]} (the matrices give "
                         f"(c1^2+9c2^2)^2 + 3c2^4)")
    record(1, fails, "all published values reproduced exactly")


def test_criterion_2_lemma_closed_forms():
    fails = []
    for eid in catalog.ids():
        j = catalog.get(eid).j
        o = oracle_invariants(build_algebra(j), eid, heavy="skip")
        for key, val in printed_lemma_values(j).items():
            if val != o[key]:
                fails.append(f"{eid}:{key} closed form {val} != oracle {o[key]}")
    n = len(fails)
    if fails:
        keys = sorted({f.split(":")[1].split()[0] for f in fails})
        fails = [f"{n} mismatches, all in {keys} (first: {fails[0]}); the quoted star "
                 f"formula lacks the term I_aabc|bc/16, with which every algebra agrees"]
    record(2, fails, f"closed forms equal oracle on all {len(catalog.ids())} catalog algebras")


def test_criterion_3_integral_identities():
    fails = []
    wanted = {"threestar", "Rcirc", "lap_ric_ric", "lap_R_R"}
    for eid in SMALL_IDS:
        checks = verify_identities(catalog.get(eid).j, eid, heavy="include")
        names = {c.name for c in checks}
        if not wanted <= names:
            fails.append(f"{eid}: missing {sorted(wanted - names)}")
        fails += [f"{eid}:{c.name} {c.lhs} != {c.rhs}" for c in checks
                  if c.name in wanted and not c.passed]
    record(3, fails, f"identities exact on {len(SMALL_IDS)} algebras of dimension <= 12")


def test_criterion_4_heat_invariants():
    fails = []
    for pid in ISO_PAIRS:
        a, b = catalog.get_pair(pid)
        ra, rb = full_report(a.j, a.id), full_report(b.j, b.id)
        ha, hb = heat_integrands(ra), heat_integrands(rb)
        if ha[1:] != hb[1:]:
            fails.append(f"{pid}: a2/a3 {ha[1:]} vs {hb[1:]}")
    record(4, fails, f"a2 and a3 agree within {', '.join(ISO_PAIRS)}")


def test_criterion_5_inaudibility_witnesses():
    fails = []

    def rows(pid, **kw):
        a, b = catalog.get_pair(pid)
        return compare_reports(full_report(a.j, **kw), full_report(b.j, **kw))

    def must(pid, r, differ=(), agree=()):
        for k in differ:
            if not r[k]["differs"]:
                fails.append(f"{pid}: {k} does not differ")
        for k in agree:
            if r[k]["differs"]:
                fails.append(f"{pid}: {k} differs by {r[k]['delta']}")

    must("fourthree", rows("fourthree"), differ=["trRic3"])
    must("fivethree", rows("fivethree"), differ=["star", "starstar", "threestar", "grad_ric2"],
         agree=["ric2", "R2"])
    must("sixtwo", rows("sixtwo"), differ=["ric2", "R2"])
    h = rows("heis3")
    want = {"grad_R2": F(-3, 2) * 384, "Rhat": F(-7, 16) * 384, "Rcirc": F(-17, 64) * 384}
    for k, d in want.items():
        if h[k]["delta"] != d:
            fails.append(f"heis3: {k} delta {h[k]['delta']} != {d}")
    record(5, fails, "all listed invariants differ or agree as stated; heis3 deltas -576, -168, -102")


def test_criterion_6_heisenberg_structure():
    fails = []
    heis = [eid for eid in catalog.ids() if eid.startswith("heis")]
    for eid in heis:
        if not is_heisenberg_type(catalog.get(eid).j)[0]:
            fails.append(f"{eid} violates j_Z j_W + j_W j_Z = -2<Z,W>")
    for eid in ("heis3-1-0", "heis3-2-0", "heis3-1-1"):
        j = catalog.get(eid).j
        W = wedge_operator(build_algebra(j))
        for q in range(1, 5):
            if W.trace_power(q) != wedge_trace_formula(j, q):
                fails.append(f"{eid} q={q}: {W.trace_power(q)} != {wedge_trace_formula(j, q)}")
    fp = {eid: curvature_fingerprint(build_algebra(catalog.get(eid).j), 4)
          for eid in ("heis3-2-0", "heis3-1-1", "heis3-0-2")}
    if fp["heis3-2-0"].wedge_traces[2] == fp["heis3-1-1"].wedge_traces[2]:
        fails.append("(2,0) and (1,1) not distinguished at q = 3")
    if fp["heis3-2-0"] != fp["heis3-0-2"]:
        fails.append("(2,0) and (0,2) fingerprints differ")
    record(6, fails, f"relation holds on {len(heis)} constructions; wedge traces q=1..4 match; "
                     "fingerprints separate (2,0)/(1,1), match (2,0)/(0,2)")


def test_criterion_7_dimension_23():
    a, b = catalog.get_pair("heis7")
    fails = []
    ra = full_report(a.j, a.id)
    rb = full_report(b.j, b.id)
    if set(ra.skipped) != HEAVY_IDS:
        fails.append(f"unexpected skipped set {ra.skipped}")
    r = compare_reports(ra, rb)
    if "grad_R2" not in r:
        fails.append("|nabla R|^2 not computed")
    fails += [f"{k} differs by {v['delta']}" for k, v in r.items() if v["differs"]]
    record(7, fails, f"{len(r)} order<=6 invariants equal at dimension 23 "
                     f"(Laplacian-type ids skipped by default)")


def test_criterion_8_gordon_wilson():
    fails = []
    for pid in ("fourthree", "fivethree", "sixtwo"):
        a, b = catalog.get_pair(pid)
        rep = gordon_wilson_check(a.j, b.j)
        if not rep.passed:
            fails.append(f"{pid}: {rep}")
    record(8, fails, "charpoly, lattice closure and kernel-lattice checks pass for all three pairs")


def _symmetry_failures(eid):
    alg = build_algebra(catalog.get(eid).j)
    n, R, G, br = alg.dim, alg.curvature, alg.connection.gamma, alg.bracket
    out = []
    for A, B, C in itertools.product(range(n), repeat=3):
        if G.component(A, B, C) - G.component(B, A, C) != br.component(A, B, C):
            out.append(f"{eid} torsion {A, B, C}")
        if G.component(A, B, C) != -G.component(A, C, B):
            out.append(f"{eid} metric {A, B, C}")
    for a, b, c, d in itertools.product(range(n), repeat=4):
        v = R.component(a, b, c, d)
        if v != -R.component(b, a, c, d) or v != R.component(c, d, a, b):
            out.append(f"{eid} symmetry {a, b, c, d}")
        if v + R.component(b, c, a, d) + R.component(c, a, b, d) != 0:
            out.append(f"{eid} first Bianchi {a, b, c, d}")
    dR = covariant_derivative(R, alg.connection)
    for e, a, b, c, d in itertools.product(range(n), repeat=5):
        if dR.component(e, a, b, c, d) + dR.component(a, b, e, c, d) + dR.component(b, e, a, c, d):
            out.append(f"{eid} second Bianchi {e, a, b, c, d}")
    return out[:5]


def test_criterion_9_property_suites():
    fails = []
    for eid in ("fourthree", "fivethree-prime", "sixtwo", "heis3-1-1"):
        fails += _symmetry_failures(eid)
    # parity vanishing for R, nabla R, nabla^2 R on the m=4 example
    alg = build_algebra(catalog.get("fourthree").j)
    t = alg.curvature
    for p in range(3):
        odd = [idx for idx, v in t.items() if v and sum(i < alg.m for i in idx) % 2]
        if odd:
            fails.append(f"parity: nabla^{p} R nonzero at {odd[0]}")
        t = covariant_derivative(t, alg.connection)
    # cyclicity and orthogonal equivalence of trace invariants
    j = catalog.get("fivethree").j
    A = cayley_orthogonal(Mat.from_rows([[0, 1, 0, 0, F(1, 2)], [-1, 0, 2, 0, 0], [0, -2, 0, 1, 0],
                                         [0, 0, -1, 0, 3], [F(-1, 2), 0, 0, -3, 0]]))
    B = cayley_orthogonal(Mat.from_rows([[0, F(1, 3), 1], [F(-1, 3), 0, 2], [-1, -2, 0]]))
    jt = j.transformed(A, B)
    for name, spec in NAMED_SPECS.items():
        base = eval_trace_invariant(spec, j)
        g = spec.split("|")
        rotated = "|".join([g[0][1:] + g[0][:1]] + g[1:])
        if eval_trace_invariant(rotated, j) != base:
            fails.append(f"cyclicity {name}")
        if eval_trace_invariant(spec, jt) != base:
            fails.append(f"orthogonal invariance {name}")
    # isospectral pairs share Tr(j_Z j_W)
    for pid in ISO_PAIRS:
        a, b = catalog.get_pair(pid)
        if not jmap_isospectral(a.j, b.j).isospectral:
            fails.append(f"{pid} not isospectral")
        for x, y in itertools.combinations_with_replacement(range(a.j.r), 2):
            if (a.j[x] @ a.j[y]).trace() != (b.j[x] @ b.j[y]).trace():
                fails.append(f"{pid} Tr(j_{x} j_{y}) differs")
    readme = (ROOT / "README.md").read_text(encoding="utf-8")
    if "Laplace spectra are not computed" not in readme:
        fails.append("README does not state that Laplace spectra are not computed")
    record(9, fails, "symmetries, Bianchi, torsion, metric, parity, trace-invariant and "
                     "pairwise-trace properties hold; README states the spectra caveat")
