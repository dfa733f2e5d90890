"""Benchmark the compiled metric kernels against the pure-Python fallback.

Runs both implementations on identical random workloads, checks that
they agree, and prints per-size timings with the speedup factor.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 32 128 512 --repeats 7
"""

import argparse
import sys
import timeit

import numpy as np

from mcqforge import _kernels_py
from mcqforge import kernels

try:
    from mcqforge import _speedups
except ImportError:
    _speedups = None


def _lcs_workload(rng, size):
    a = rng.integers(0, 16, size=size).astype(np.int64)
    b = rng.integers(0, 16, size=size).astype(np.int64)
    return (a, b)


def _ngram_workload(rng, size):
    hyp = rng.integers(0, 64, size=size).astype(np.int64)
    refs = [rng.integers(0, 64, size=size).astype(np.int64) for _ in range(3)]
    return (hyp, refs, 2)


def _time(fn, args, repeats):
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeats, number)) / number


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[32, 128, 512])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    print(f"active kernel backend: {kernels.BACKEND}")
    if _speedups is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(args.seed)
    cases = [("lcs_length_ids", _lcs_workload),
             ("ngram_clip", _ngram_workload)]

    header = f"{'kernel':<16} {'size':>6} {'python':>12} {'cython':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, make in cases:
        pure_fn = getattr(_kernels_py, name)
        fast_fn = getattr(_speedups, name)
        for size in args.sizes:
            workload = make(rng, size)
            expected = pure_fn(*workload)
            got = fast_fn(*workload)
            if tuple(np.atleast_1d(expected)) != tuple(np.atleast_1d(got)):
                print(f"MISMATCH in {name} at size {size}: "
                      f"python={expected!r} cython={got!r}", file=sys.stderr)
                return 1
            pure_s = _time(pure_fn, workload, args.repeats)
            fast_s = _time(fast_fn, workload, args.repeats)
            print(f"{name:<16} {size:>6} {pure_s * 1e3:>10.3f}ms "
                  f"{fast_s * 1e3:>10.3f}ms {pure_s / fast_s:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
