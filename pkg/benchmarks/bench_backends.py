"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_backends.py [--steps 1000,2000,5000] [--repeat 3]

Prints one row per (operation, N) with the best-of-repeat wall time of each
backend, the speedup, and the max relative difference between their outputs.
"""

import argparse
import time

import numpy as np

from memflow import _backend
from memflow import kernels as K


def best_time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", default="1000,2000,5000")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if "cython" not in _backend.BACKENDS:
        raise SystemExit("compiled backend not built; run `pip install -e . --no-build-isolation`")
    fast, slow = _backend.get("cython"), _backend.get("python")
    spec = K.stretched(1.0, 0.5)
    print(f"{'operation':<12}{'N':>7}{'cython s':>12}{'python s':>12}{'speedup':>10}{'rel diff':>11}")
    for n in (int(v) for v in args.steps.split(",")):
        dt = 5.0 / n
        k = np.asarray(spec(np.arange(n + 1) * dt), dtype=np.float64)
        g = np.exp(-np.arange(n + 1) * dt)
        cases = {
            "relaxation": lambda b: b.relaxation_recursion(k, 2.0, dt),
            "resolvent": lambda b: b.resolvent_recursion(k, dt),
            "convolution": lambda b: b.trapezoid_convolution(k, g, dt),
        }
        for name, call in cases.items():
            tf, vf = best_time(lambda: call(fast), args.repeat)
            ts, vs = best_time(lambda: call(slow), args.repeat)
            vf, vs = np.asarray(vf), np.asarray(vs)
            rel = float(np.max(np.abs(vf - vs)) / max(np.max(np.abs(vs)), 1e-300))
            print(f"{name:<12}{n:>7}{tf:>12.4f}{ts:>12.4f}{ts / tf:>10.1f}{rel:>11.1e}")


if __name__ == "__main__":
    main()
