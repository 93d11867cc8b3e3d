"""Compare the compiled and numpy kernel backends.

Run with ``python benchmarks/bench_kernels.py``. Prints the best-of-N wall
time per call for each backend and the speedup over the numpy fallback.
"""
import argparse
import timeit

import numpy as np

from lowres_mimo import kernels
from lowres_mimo.channel import complex_normal


def _cases(rng):
    for T, M, N in ((64, 128, 10), (64, 512, 10), (256, 32, 4)):
        A = complex_normal(rng, (T, M, N))
        B = complex_normal(rng, (T, M, N))
        yield f"mrc_terms T={T} M={M} N={N}", "mrc_terms", (A, B)
    levels = np.linspace(-2.0, 2.0, 16)
    thresholds = 0.5 * (levels[1:] + levels[:-1])
    for size in (10_000, 1_000_000):
        yield f"quantize_real n={size} L=16", "quantize_real", (rng.standard_normal(size), thresholds, levels)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; timing the numpy fallback only")
    rng = np.random.default_rng(0)
    print(f"{'case':<34}" + "".join(f"{name:>12}" for name in sorted(backends)) + f"{'speedup':>10}")
    for label, fn, inputs in _cases(rng):
        times = {}
        for name, mod in sorted(backends.items()):
            f = getattr(mod, fn)
            f(*inputs)
            number = 3
            times[name] = min(timeit.repeat(lambda: f(*inputs), number=number, repeat=args.repeat)) / number
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:<34}" + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in sorted(times)) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
