"""Time every kernel on the numba and numpy backends.

Usage: python3 benchmarks/bench_kernels.py [--size 512] [--regions 32] [--repeat 5]

Each kernel is run once to warm the JIT, then timed ``--repeat`` times; the
best time is reported. Outputs of the two backends are compared as well.
"""
import argparse
import time

import numpy as np

from regionfuse import kernels
from regionfuse._backend import HAVE_NUMBA


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases(size, regions, seed=0):
    rng = np.random.default_rng(seed)
    R = rng.random((regions, size, size))
    V = rng.random(regions)
    Vc = rng.random((regions, 8))
    D = rng.random((size, size, 1))
    index, _ = kernels.soft_assign(R, V, impl=kernels.get_backend("numpy"))
    labels = rng.integers(0, 4, (size, size))
    valid = np.ones((size, size), bool)
    return {
        "label_equal": lambda m: kernels.label_equal(labels, valid, 8, impl=m),
        "soft_assign": lambda m: kernels.soft_assign(R, V, impl=m),
        "hard_assign": lambda m: kernels.hard_assign(R, V, 0.5, impl=m),
        "class_fusion": lambda m: kernels.class_fusion(R, Vc, impl=m),
        "region_sums": lambda m: kernels.region_sums(index, D, regions, impl=m),
        "scf_apply": lambda m: kernels.scf_apply(D, index, np.ones((regions, 1)), impl=m),
    }


def _same(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.allclose(x, y, rtol=0, atol=1e-9) for x, y in zip(a, b))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=512)
    parser.add_argument("--regions", type=int, default=32)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    np_impl, nb_impl = kernels.get_backend("numpy"), kernels.get_backend("numba")
    print(f"{args.size}x{args.size} image, {args.regions} regions, best of {args.repeat}")
    print(f"{'kernel':<14}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}  agree")
    for name, fn in cases(args.size, args.regions).items():
        t_np = best_of(lambda: fn(np_impl), args.repeat)
        t_nb = best_of(lambda: fn(nb_impl), args.repeat)
        agree = _same(fn(np_impl), fn(nb_impl))
        print(f"{name:<14}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>9.1f}x  {agree}")


if __name__ == "__main__":
    main()
