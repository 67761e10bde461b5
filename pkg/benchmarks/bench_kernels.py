"""Compare the compiled and NumPy kernel backends.

    python benchmarks/bench_kernels.py [--n 32768] [--d 8] [--repeat 5]

Prints the median wall time of each kernel on each available backend and
the speedup of the compiled one.
"""
import argparse
import statistics
import time

import numpy as np
import scipy.sparse as sp

import normsketch as ns
from normsketch.matrix import csr_arrays


def _median_time(fn, repeat):
    fn()  # warm caches
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def cases(n, d, density, rng):
    A = ns.as_csr(sp.random(n, d, density=density, format="csr", random_state=rng,
                            data_rvs=rng.standard_normal))
    arrs = csr_arrays(A)
    x = rng.standard_normal(d)
    t = int(np.ceil(np.log2(n)))
    weights = np.sqrt(2.0 ** np.arange(t + 1))
    rows = rng.standard_normal((200, n))
    return {
        "spmv": lambda k: k.spmv(*arrs, x),
        "countsketch": lambda k: k.countsketch(*arrs, d, 100 * d * d, np.uint64(1)),
        "symsketch": lambda k: k.symsketch(*arrs, d, weights, np.uint64(2), np.uint64(3), 100 * d * d),
        "orlicz_roots(huber)": lambda k: k.orlicz_roots(2, 0.1, rows, None, 1e-10),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=2**15)
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--density", type=float, default=0.25)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    backends = ns.available_backends()
    table = {}
    for name, fn in cases(args.n, args.d, args.density, np.random.default_rng(0)).items():
        for backend in backends:
            with ns.use_backend(backend) as k:
                table[name, backend] = _median_time(lambda: fn(k), args.repeat)

    print(f"n={args.n} d={args.d} density={args.density} repeat={args.repeat}")
    header = f"{'kernel':<22}" + "".join(f"{b + ' (ms)':>16}" for b in backends)
    if "cython" in backends:
        header += f"{'speedup':>10}"
    print(header)
    for name in cases(8, 2, 0.5, np.random.default_rng(0)):
        line = f"{name:<22}" + "".join(f"{table[name, b] * 1e3:>16.3f}" for b in backends)
        if "cython" in backends:
            line += f"{table[name, 'python'] / table[name, 'cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
