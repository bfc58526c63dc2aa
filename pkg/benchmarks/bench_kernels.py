"""Compare the compiled kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--examples id,id,...]

Times the two hot paths on catalog algebras: the covariant derivative of the
curvature tensor and complete contractions (|nabla R|^2 and a cubic curvature
word).  Both backends must give identical results; the script exits 1 if they
do not.
"""
from __future__ import annotations

import argparse
import sys
import timeit

from nilcurv import catalog
from nilcurv.kernels import available_backends
from nilcurv.liealg import build_algebra, covariant_derivative
from nilcurv.tensor import trace_word

DEFAULT_EXAMPLES = "fivethree,sixtwo,heis3-2-0,heis3-3-0,heis7-2-0"


def bench_one(eid: str, repeat: int) -> list[tuple[str, str, float, object]]:
    alg = build_algebra(catalog.get(eid).j)
    R = alg.curvature
    conn = alg.connection
    rows = []
    for backend in available_backends():
        dR = covariant_derivative(R, conn, backend=backend)
        t_cd = min(timeit.repeat(lambda: covariant_derivative(R, conn, backend=backend),
                                 number=1, repeat=repeat))
        val = trace_word("abcdeabcde", dR, dR, backend=backend)
        t_tr = min(timeit.repeat(lambda: trace_word("abcdeabcde", dR, dR, backend=backend),
                                 number=1, repeat=repeat))
        rc = trace_word("ikjlkplqpiqj", R, R, R, backend=backend)
        t_rc = min(timeit.repeat(lambda: trace_word("ikjlkplqpiqj", R, R, R, backend=backend),
                                 number=1, repeat=repeat))
        rows.append((backend, "covariant_derivative", t_cd, dR))
        rows.append((backend, "contract |nabla R|^2", t_tr, val))
        rows.append((backend, "contract R R R", t_rc, rc))
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--examples", default=DEFAULT_EXAMPLES)
    args = ap.parse_args(argv)
    backends = available_backends()
    if len(backends) < 2:
        print("compiled kernels are not built; only the python backend is available")
    ok = True
    print(f"{'example':<12} {'dim':>4} {'kernel':<22} " + " ".join(f"{b:>10}" for b in backends)
          + ("   speedup" if len(backends) > 1 else ""))
    for eid in args.examples.split(","):
        rows = bench_one(eid, args.repeat)
        dim = catalog.get(eid).j.m + catalog.get(eid).j.r
        for kernel in ("covariant_derivative", "contract |nabla R|^2", "contract R R R"):
            sel = [r for r in rows if r[1] == kernel]
            times = [r[2] for r in sel]
            results = [r[3] for r in sel]
            if len(results) > 1 and results[0] != results[1]:
                ok = False
                print(f"MISMATCH {eid} {kernel}", file=sys.stderr)
            line = f"{eid:<12} {dim:>4} {kernel:<22} " + " ".join(f"{t:>9.4f}s" for t in times)
            if len(times) > 1 and times[0] > 0:
                line += f" {times[1] / times[0]:>8.1f}x"
            print(line)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
