"""Compare the numba and numpy kernel backends.

Part one times each kernel pair in-process on a few input sizes. Part two
runs a small sweep end to end in fresh interpreters with and without
GSTATINV_DISABLE_NUMBA, so the numbers include everything a user would see.

    python3 benchmarks/bench_kernels.py [--repeat 50] [--skip-e2e]
"""
import argparse
import os
import subprocess
import sys
import tempfile
import textwrap
import timeit

import numpy as np

from gstatinv import kernels


def kernel_args(name, n, rng):
    x = rng.normal(size=n)
    w = rng.normal(size=43)
    return {
        "log_objective": (x, 0.5, 2.0),
        "log_influence": (x, 0.5, 2.0),
        "asinh_objective": (x, 0.3, 1.5),
        "asinh_influence": (x, 0.3, 1.2),
        "half_sumsq": (x,),
        "convolve_full": (x, w),
        "correlate_valid": (np.concatenate([x, w[:-1]]), w),
    }[name]


def bench_kernels(sizes, repeat):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16s} {'n':>7s} {'numba us':>10s} {'numpy us':>10s} {'speedup':>8s}")
    for name, (nb, npy) in kernels.PAIRS.items():
        for n in sizes:
            args = kernel_args(name, n, rng)
            nb(*args)  # compile outside the timed region
            t_nb = min(timeit.repeat(lambda: nb(*args), number=repeat, repeat=3)) / repeat
            t_np = min(timeit.repeat(lambda: npy(*args), number=repeat, repeat=3)) / repeat
            print(f"{name:<16s} {n:>7d} {1e6 * t_nb:>10.2f} {1e6 * t_np:>10.2f} {t_np / t_nb:>7.2f}x")


E2E = textwrap.dedent("""
    import time
    from gstatinv import kernels
    from gstatinv.config import load_config
    from gstatinv.experiments import run_heatmap_sweep, sweep_grids
    cfg = load_config()
    run_heatmap_sweep(sweep_grids(cfg)[:1], cfg)  # warm-up
    t0 = time.perf_counter()
    res = run_heatmap_sweep(sweep_grids(cfg), cfg)
    print(kernels.BACKEND, len(res), time.perf_counter() - t0)
""")


def bench_e2e():
    print("\nfull default sweep, one process")
    for flag in ("0", "1"):
        env = dict(os.environ, GSTATINV_DISABLE_NUMBA=flag)
        with tempfile.TemporaryDirectory() as tmp:
            out = subprocess.run([sys.executable, "-c", E2E], env=env, cwd=tmp,
                                 capture_output=True, text=True, check=True).stdout.split()
        backend, cells, secs = out[0], int(out[1]), float(out[2])
        print(f"  {backend:<6s} {cells} cells in {secs:.2f} s ({1e3 * secs / cells:.2f} ms/cell)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=50)
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 512, 10_000])
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()
    bench_kernels(args.sizes, args.repeat)
    if not args.skip_e2e:
        bench_e2e()


if __name__ == "__main__":
    main()
