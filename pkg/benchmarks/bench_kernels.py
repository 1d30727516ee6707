"""Compare the compiled scanning kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--size N] [--repeat R]

Prints one row per kernel with the best-of-R wall time of each backend and
the speedup, after checking both return the same answer.
"""

import argparse
import timeit

import numpy as np

from prodrec import _kernels


def cases(size, rng):
    sparse = (rng.random(size) < 0.6).astype(np.uint8)
    dense = (rng.random(size) < 0.97).astype(np.uint8)
    bits = rng.integers(0, 2, size + 64, dtype=np.uint8)
    pattern = np.array([1, 0, 1, 1, 0, 1, 1, 1], dtype=np.uint8)
    return {
        "longest_zero_run": (sparse,),
        "first_one_run": (dense, 200),
        "first_ps_window": (sparse, 2, 400),
        "best_density": (sparse, 300),
        "match_cylinder": (bits, pattern, 0, size),
    }


def same(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if _kernels.compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
    rng = np.random.default_rng(args.seed)
    print(f"size={args.size} repeat={args.repeat}")
    print(f"{'kernel':<18} {'cython ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for name, call_args in cases(args.size, rng).items():
        fast, slow = getattr(_kernels.compiled, name), getattr(_kernels.fallback, name)
        assert same(fast(*call_args), slow(*call_args)), name
        t_fast = min(timeit.repeat(lambda: fast(*call_args), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: slow(*call_args), number=1, repeat=args.repeat))
        print(f"{name:<18} {t_fast * 1e3:>10.3f} {t_slow * 1e3:>10.3f} {t_slow / t_fast:>7.1f}x")


if __name__ == "__main__":
    main()
