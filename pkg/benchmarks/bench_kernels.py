"""Compare the compiled mod-p echelon kernel with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--sizes 40 80 160] [--repeat 3]
"""
import argparse
import time

import numpy as np

from tubeinv import _kernels
from tubeinv._kernels import modp_py

P = 2147483629


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[40, 80, 160, 320])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"selected kernel: {_kernels.KERNEL}")
    print(f"{'n':>6} {'compiled [s]':>14} {'fallback [s]':>14} {'speedup':>9}")
    for n in args.sizes:
        mat = rng.integers(0, P, size=(n, n + n // 2), dtype=np.int64)
        fast, r1 = best_of(lambda: _kernels.echelon_modp(mat.copy(), P), args.repeat)
        slow, r2 = best_of(lambda: modp_py.echelon_modp(mat.copy(), P), args.repeat)
        assert r1[:2] == r2[:2]
        print(f"{n:>6} {fast:>14.5f} {slow:>14.5f} {slow / fast:>8.1f}x")


if __name__ == "__main__":
    main()
