"""Benchmark the numba kernel path against the pure-numpy fallback.

Runs each kernel in-process under whichever backend is active (set by the
AVALON_PURE_NUMPY env flag at import time), so the script re-executes itself
in a subprocess for the second backend and merges the timings.

Usage: python3 bench/benchmark.py [--repeats N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from avalon_assassin import _kernels  # noqa: E402


def bench(fn, *args, repeats: int) -> float:
    fn(*args)  # warm-up (numba JIT compile)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def run(repeats: int) -> dict:
    rng = np.random.default_rng(0)
    results = {"backend": _kernels.backend()}

    X = rng.normal(size=(800, 45))
    Z = rng.normal(size=(600, 45))
    results["rbf_kernel_800x600x45"] = bench(
        _kernels.rbf_kernel, X, Z, 0.1, repeats=repeats)

    Xh = rng.normal(size=(4000, 45))
    yh = np.where(rng.integers(0, 2, size=4000) > 0, 1.0, -1.0)
    theta = rng.normal(size=46)
    results["squared_hinge_4000x45"] = bench(
        _kernels.squared_hinge, theta, Xh, yh, 1.0, repeats=repeats)

    Xs = rng.normal(size=(400, 10))
    ys = np.where(rng.integers(0, 2, size=400) > 0, 1.0, -1.0)
    K = _kernels.rbf_kernel_numpy(Xs, Xs, 0.5)
    results["smo_solve_n400"] = bench(
        _kernels.smo_solve, K, ys, 1.0, 1e-3, 200_000, repeats=repeats)
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--json", action="store_true",
                        help="print raw timings as JSON (used internally)")
    args = parser.parse_args()

    mine = run(args.repeats)
    if args.json:
        print(json.dumps(mine))
        return

    env = dict(os.environ)
    if _kernels.backend() == "numba":
        env["AVALON_PURE_NUMPY"] = "1"
    else:
        env.pop("AVALON_PURE_NUMPY", None)
    other = json.loads(subprocess.run(
        [sys.executable, __file__, "--repeats", str(args.repeats), "--json"],
        env=env, capture_output=True, text=True, check=True).stdout)

    by_backend = {mine["backend"]: mine, other["backend"]: other}
    numba_t = by_backend.get("numba")
    numpy_t = by_backend.get("numpy")
    kernels = [k for k in mine if k != "backend"]

    print(f"{'kernel':32s} {'numba (s)':>12s} {'numpy (s)':>12s} {'speedup':>8s}")
    for k in kernels:
        tn = numba_t[k] if numba_t else float("nan")
        tp = numpy_t[k] if numpy_t else float("nan")
        print(f"{k:32s} {tn:12.6f} {tp:12.6f} {tp / tn:7.2f}x")


if __name__ == "__main__":
    main()
