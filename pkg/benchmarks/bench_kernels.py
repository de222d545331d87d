"""
Compare the numba and pure-numpy kernels on the two hot loops.

    python benchmarks/bench_kernels.py [--points N] [--repeat R]

Both implementations are imported directly, so the FUNCEQ_DISABLE_NUMBA flag
does not matter here.  The first numba call (compilation) is excluded.
"""

import argparse
import time

import numpy as np

from funceq import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--points", type=int, default=1_000_000)
    parser.add_argument("--degree", type=int, default=4)
    parser.add_argument("--batch", type=int, default=10_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if not _kernels.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    s = rng.uniform(-10.0, 8.0, args.points)
    a = rng.uniform(-1.0, 1.0, args.degree)
    b = rng.uniform(-1.0, 1.0, args.degree)
    c = rng.uniform(0.1, 2.0, args.batch)
    L = rng.uniform(-2.0, 2.0, args.batch)
    p0 = rng.uniform(-2.0, 2.0, args.batch)

    _kernels.warmup()
    p_nb, dp_nb = _kernels.fourier_eval_numba(s, 0.5, a, b)
    p_np, dp_np = _kernels.fourier_eval_numpy(s, 0.5, a, b)
    y_nb = _kernels.rk4_linear_numba(c, L, p0, 1e-3)
    y_np = _kernels.rk4_linear_numpy(c, L, p0, 1e-3)

    cases = [
        (
            f"fourier_eval  {args.points} pts, degree {args.degree}",
            lambda: _kernels.fourier_eval_numba(s, 0.5, a, b),
            lambda: _kernels.fourier_eval_numpy(s, 0.5, a, b),
            max(np.abs(p_nb - p_np).max(), np.abs(dp_nb - dp_np).max()),
        ),
        (
            f"rk4_linear    {args.batch} runs, step 1e-3",
            lambda: _kernels.rk4_linear_numba(c, L, p0, 1e-3),
            lambda: _kernels.rk4_linear_numpy(c, L, p0, 1e-3),
            np.abs(y_nb - y_np).max(),
        ),
    ]
    print(f"{'kernel':<40} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8} {'max diff':>10}")
    for name, fast, slow, diff in cases:
        t_nb = best_of(fast, args.repeat)
        t_np = best_of(slow, args.repeat)
        print(f"{name:<40} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>8.1f} {diff:>10.2g}")


if __name__ == "__main__":
    main()
