"""Compiled vs pure-Python estimator kernels.

Run with ``python3 benchmarks/bench_kernels.py``. Prints the median time per
call for each backend and the speed-up, for the 1D sizes used by the
Monte Carlo runs (coefficients per level) and a 2D field.
"""

import argparse
import timeit

import numpy as np

from dtnoise import kernels


def bench(fn, repeat):
    t = timeit.repeat(fn, number=1, repeat=repeat)
    return float(np.median(t))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"compiled backend available: {kernels.BACKEND == 'compiled'}")
    print(f"{'case':<28}{'python [ms]':>14}{'compiled [ms]':>16}{'speed-up':>10}")
    lags = np.arange(-8, 9)
    cases = []
    for n in (256, 1024, 4096, 16384):
        a, b = rng.standard_normal(n), rng.standard_normal(n)
        cases.append((f"1D n={n}, 17 lags",
                      lambda a=a, b=b, be=None: kernels.circular_xcov(a, b, lags, backend=be)))
    a2, b2 = rng.standard_normal((84, 84)), rng.standard_normal((84, 84))
    l2 = np.arange(4)
    cases.append(("2D 84x84, 4x4 lags",
                  lambda be=None: kernels.circular_xcov2d(a2, b2, l2, l2, backend=be)))
    for name, fn in cases:
        tp = bench(lambda: fn(be="python"), args.repeat)
        if kernels.BACKEND == "compiled":
            tc = bench(lambda: fn(be=None), args.repeat)
            print(f"{name:<28}{tp * 1e3:>14.3f}{tc * 1e3:>16.3f}{tp / tc:>10.1f}")
        else:
            print(f"{name:<28}{tp * 1e3:>14.3f}{'n/a':>16}{'':>10}")


if __name__ == "__main__":
    main()
