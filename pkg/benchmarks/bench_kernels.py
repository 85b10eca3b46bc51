"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [repeats]

Times the hot search kernels on representative workbench inputs and the
end-to-end membership check of a budget-60 approximation.  Both backends
produce bit-identical results; the point of the extension is the speedup
reported here.
"""

import sys
import time

from amalgam._kernels import _pykernels

try:
    from amalgam._kernels import _ckernels
except ImportError:
    _ckernels = None

from amalgam.classes import preset_p0
from amalgam.amalgamation import build_generic
from amalgam.graphs import FinGraph, cycle

PETERSEN = FinGraph(10, [
    (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
    (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
    (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
])


def timer(fn, repeats):
    best = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    cls = preset_p0()
    approx = build_generic(cls, 60)
    g = approx.graph
    c5 = cycle(5)
    c6 = cycle(6)
    wv, we, fsc = cls.scaled_for(g.n)

    cases = {
        "bfs all-pairs (n=60)": lambda k: [
            k.bfs_dists(g.n, g.adj, v) for v in range(g.n)
        ],
        "C5 embeddings into Petersen (all)": lambda k: k.enum_embeddings(
            c5.n, c5.adj, PETERSEN.n, PETERSEN.adj, limit=0
        ),
        "C6 embeddings into budget-60 (all)": lambda k: k.enum_embeddings(
            c6.n, c6.adj, g.n, g.adj, limit=0
        ),
        "delta sweep (full membership, n=60)": lambda k: k.min_subset_slack(
            g.n, g.adj, wv, we, fsc, stop_at_negative=False
        ),
        "closure search (base = one edge)": lambda k: k.min_superset_delta(
            g.n, g.adj, wv, we, 0b11
        ),
    }

    print(f"{'kernel':40s} {'pure':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, payload in cases.items():
        tp = timer(lambda: payload(_pykernels), repeats)
        if _ckernels is None:
            print(f"{name:40s} {tp * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")
            continue
        rp = payload(_pykernels)
        rc = payload(_ckernels)
        assert rp == rc, f"backend mismatch on {name}"
        tc = timer(lambda: payload(_ckernels), repeats)
        print(f"{name:40s} {tp * 1e3:9.2f}ms {tc * 1e3:9.2f}ms "
              f"{tp / tc:7.1f}x")

    import os
    import subprocess

    ends = {
        "build_generic(budget=60) end-to-end": (
            "from amalgam.classes import preset_p0; "
            "from amalgam.amalgamation import build_generic; "
            "import time; t0=time.perf_counter(); "
            "build_generic(preset_p0(), 60); "
            "print(time.perf_counter()-t0)"
        ),
        "verify properties(budget=60) end-to-end": (
            "from amalgam.classes import preset_p0; "
            "from amalgam.amalgamation import build_generic; "
            "from amalgam.verify import verify_construction_properties; "
            "import time; cls=preset_p0(); ap=build_generic(cls, 60); "
            "t0=time.perf_counter(); "
            "verify_construction_properties(cls, ap); "
            "print(time.perf_counter()-t0)"
        ),
    }
    for name, code in ends.items():
        env = dict(os.environ, AMALGAM_PURE="1")
        t_pure = float(subprocess.check_output([sys.executable, "-c", code],
                                               env=env))
        env.pop("AMALGAM_PURE")
        t_comp = float(subprocess.check_output([sys.executable, "-c", code],
                                               env=env))
        print(f"{name:40s} {t_pure * 1e3:9.2f}ms {t_comp * 1e3:9.2f}ms "
              f"{t_pure / t_comp:7.1f}x")


if __name__ == "__main__":
    main()
