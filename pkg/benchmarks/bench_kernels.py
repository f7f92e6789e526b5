"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from discopile import _pykernels

try:
    from discopile import _ckernels
except ImportError:
    _ckernels = None


def random_unitary(rng, k):
    z = rng.normal(size=(2 ** k, 2 ** k)) + 1j * rng.normal(size=(2 ** k, 2 ** k))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (z + z.conj().T) / 2


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':<28}" + "".join(f"{name:>14}" for name, _ in backends))

    for n, k in [(6, 1), (6, 2), (10, 1), (10, 2), (12, 3)]:
        psi = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
        u = random_unitary(rng, k)
        targets = list(range(n // 2, n // 2 + k))
        row = f"apply_unitary n={n:<2} k={k:<2}   "
        for _, mod in backends:
            t = bench(lambda: mod.apply_unitary(psi, n, targets, u), args.repeat)
            row += f"{t * 1e6:>11.1f} us"
        print(row)

    for d in (2, 4, 8, 16, 32):
        a = random_hermitian(rng, d)
        row = f"jacobi_eigh d={d:<3}           "
        for _, mod in backends:
            t = bench(lambda: mod.jacobi_eigh(a), args.repeat)
            row += f"{t * 1e6:>11.1f} us"
        print(row)


if __name__ == "__main__":
    main()
