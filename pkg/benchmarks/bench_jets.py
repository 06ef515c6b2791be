#!/usr/bin/env python3
"""Benchmark the compiled jet kernels against the numpy fallback.

Micro-benchmarks time the coefficient recurrences directly at several
truncation orders; the end-to-end benchmark times one intertwining-residual
evaluation (the dominant workload of the certificate suite).

Run after installing the package:

    python benchmarks/bench_jets.py [--orders 8,12,16] [--repeat 2000]
"""

import argparse
import time

import numpy as np

from pdmsusy import _jetcore_py

try:
    from pdmsusy import _jetcore
except ImportError:
    _jetcore = None


def _time(fn, args, repeat):
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def micro(orders, repeat):
    rng = np.random.default_rng(0)
    kernels = [("python", _jetcore_py)]
    if _jetcore is not None:
        kernels.append(("cython", _jetcore))
    print(f"{'kernel':10s} {'order':>5s} " +
          " ".join(f"{n:>12s}" for n in ("mul", "div", "exp", "compose")))
    for order in orders:
        a = rng.normal(size=order + 1) + 1j * rng.normal(size=order + 1)
        b = rng.normal(size=order + 1) + 1j * rng.normal(size=order + 1)
        b[0] += 3.0
        d = a.copy()
        d[0] = 0.0
        for name, mod in kernels:
            times = [
                _time(mod.mul, (a, b), repeat),
                _time(mod.div, (a, b), repeat),
                _time(mod.exp_, (a,), repeat),
                _time(mod.compose, (b, d), max(1, repeat // 10)),
            ]
            print(f"{name:10s} {order:5d} " +
                  " ".join(f"{t * 1e6:10.2f}us" for t in times))


def end_to_end():
    import os
    import subprocess
    import sys

    sys.stdout.flush()

    code = (
        "import time\n"
        "from pdmsusy import backend_name, scalarfn as sf, typea as ta, "
        "verify as vf\n"
        "cfg = ta.TypeAConfig(N=3, b=(0.2, -0.7, 0.4), R=0.1, case='III', "
        "nu=1.0)\n"
        "mass = sf.builtin_mass_profile('exp_scale', alpha=1.0)\n"
        "t0 = time.perf_counter()\n"
        "s = ta.build_type_a(cfg, mass)\n"
        "r = vf.check_intertwining(s, vf.make_grid(s))\n"
        "dt = time.perf_counter() - t0\n"
        "print(f'{backend_name():10s} build+intertwining: {dt*1e3:8.1f} ms "
        "(residual {r:.1e})')\n"
    )
    for backend in ("python", "cython"):
        env = dict(os.environ, PDMSUSY_JET_BACKEND=backend)
        try:
            subprocess.run([sys.executable, "-c", code], env=env, check=True)
        except subprocess.CalledProcessError:
            print(f"{backend:10s} unavailable")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--orders", default="8,12,16")
    ap.add_argument("--repeat", type=int, default=2000)
    args = ap.parse_args()
    orders = [int(x) for x in args.orders.split(",")]
    micro(orders, args.repeat)
    print()
    end_to_end()


if __name__ == "__main__":
    main()
