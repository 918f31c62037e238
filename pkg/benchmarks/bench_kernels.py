"""Time the numba kernels against the pure-numpy fallback.

Both backends draw the same counter-based random words, so besides timing
we check that their outputs are bitwise identical.

    python3 benchmarks/bench_kernels.py [--n 2000] [--m 4096] [--repeat 3]
"""
import argparse
import time

import numpy as np

from erwd.kernels import HAS_NUMBA, affine_recurrence, simulate_block
from erwd.model import InitialLaw, MemoryRegime
from erwd.rng import replica_keys

P, Q = 0.5, 0.3


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_walks(regime, n, m, repeat):
    keys = replica_keys(12345, np.arange(m))
    policy = regime.default_policy.code
    cps = [n // 2, n]
    init = InitialLaw.THREE_POINT.code
    run = lambda backend: simulate_block(keys, regime.code, policy, init, P, Q, n, cps, backend=backend)

    # first call compiles (or loads the on-disk cache)
    t0 = time.perf_counter()
    run("numba")
    compile_s = time.perf_counter() - t0

    t_nb, a = best_of(lambda: run("numba"), repeat)
    t_np, b = best_of(lambda: run("numpy"), repeat)
    same = all(np.array_equal(getattr(a, f), getattr(b, f)) for f in ("sums", "first_two", "tau", "s_tau", "late"))
    steps = n * m
    print(f"{regime.value:16s} numba {t_nb:8.4f}s ({1e9 * t_nb / steps:6.1f} ns/step)  "
          f"numpy {t_np:8.4f}s ({1e9 * t_np / steps:6.1f} ns/step)  "
          f"speedup {t_np / t_nb:6.1f}x  first call {compile_s:.2f}s  identical={same}")
    return same


def bench_recurrence(n, repeat):
    k = np.arange(1, n, dtype=np.float64)
    coef = 1.0 + 0.2 / k
    forcing = 0.8 - (0.2 / k) ** 2
    affine_recurrence(coef, forcing, 0.0, backend="numba")
    t_nb, a = best_of(lambda: affine_recurrence(coef, forcing, 0.0, backend="numba"), repeat)
    t_np, b = best_of(lambda: affine_recurrence(coef, forcing, 0.0, backend="numpy"), repeat)
    same = np.array_equal(a, b)
    print(f"{'recurrence':16s} numba {t_nb:8.4f}s  numpy {t_np:8.4f}s  speedup {t_np / t_nb:6.1f}x  "
          f"n={n}  identical={same}")
    return same


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="steps per walk")
    ap.add_argument("--m", type=int, default=4096, help="walks per call")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--recurrence-n", type=int, default=1_000_000)
    args = ap.parse_args()

    if not HAS_NUMBA:
        print("numba is not importable; nothing to compare")
        return

    print(f"n={args.n} m={args.m} repeat={args.repeat} (best time shown)")
    ok = True
    for regime in MemoryRegime:
        ok &= bench_walks(regime, args.n, args.m, args.repeat)
    ok &= bench_recurrence(args.recurrence_n, args.repeat)
    if not ok:
        raise SystemExit("backends disagree")


if __name__ == "__main__":
    main()
