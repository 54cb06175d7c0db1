#!/usr/bin/env python3
"""Timing comparison: compiled kernels vs the numpy fallback.

Runs the three hot paths (best-approximation scan, ball enumeration,
shortest-vector search) through both backends on identical inputs and
prints a table with the best-of-N wall times and speedups.

Usage: python3 benchmarks/bench_kernels.py [--qmax N] [--repeat K]
"""

import argparse
import time

import numpy as np

from latcrit._kernels import _npkern
from latcrit.norms import ConvexDomain2, CylinderGauge

try:
    from latcrit._kernels import _ckern
except ImportError:
    _ckern = None


def _best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_scan(backend, domain, q_max):
    d = domain.descriptor
    x1, x2 = 0.6180339887498949, 0.3819660112501051
    return lambda: backend.scan_best_approx(x1, x2, q_max, d.code, d.p, d.pre,
                                            d.normals, d.rmax, d.separable)


def bench_collect(backend, gauge, scale):
    d = gauge.descriptor
    basis = np.eye(3) * scale
    k = int(np.ceil(1.0 / scale))
    bounds = [k, k, k]
    return lambda: backend.collect_in_ball(basis, bounds, d.code, d.p, d.pre,
                                           d.normals, d.cylinder, 1.0, 10 ** 7)


def bench_min_gauge(backend, gauge, n_bases):
    d = gauge.descriptor
    rng = np.random.default_rng(1)
    bases = []
    for _ in range(n_bases):
        while True:
            b = rng.normal(size=(3, 3))
            if abs(np.linalg.det(b)) > 0.3:
                break
        bases.append(b / abs(np.linalg.det(b)) ** (1 / 3))
    bounds = [6, 6, 6]

    def run():
        for b in bases:
            backend.min_gauge(b, bounds, d.code, d.p, d.pre, d.normals,
                              d.cylinder)
    return run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qmax", type=int, default=10 ** 6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    cyl = CylinderGauge(ConvexDomain2.euclidean())
    cases = [
        ("scan euclidean qmax=%g" % args.qmax,
         lambda be: bench_scan(be, ConvexDomain2.euclidean(), args.qmax)),
        ("scan sup qmax=%g" % args.qmax,
         lambda be: bench_scan(be, ConvexDomain2.sup(), args.qmax)),
        ("scan p:4 qmax=%g" % args.qmax,
         lambda be: bench_scan(be, ConvexDomain2.pnorm(4), args.qmax)),
        ("enumerate cylinder ball (~2k pts)",
         lambda be: bench_collect(be, cyl, 0.16)),
        ("shortest vector x200 bases",
         lambda be: bench_min_gauge(be, cyl, 200)),
    ]

    if _ckern is None:
        print("compiled backend not available; timing numpy only")

    width = max(len(name) for name, _ in cases)
    header = f"{'case':<{width}}  {'numpy':>9}  {'c':>9}  {'speedup':>7}"
    print(header)
    print("-" * len(header))
    for name, make in cases:
        t_np = _best_of(make(_npkern), args.repeat)
        row = f"{name:<{width}}  {t_np * 1e3:>7.1f}ms"
        if _ckern is not None:
            t_c = _best_of(make(_ckern), args.repeat)
            row += f"  {t_c * 1e3:>7.1f}ms  {t_np / t_c:>6.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
