"""Timing comparison of the numpy and numba hot-kernel implementations.

Runs the two inner-loop kernels (the local pair rotation and the slaved-probe
spatial scan) on realistic grid sizes with both backends and prints a small
table. The numba rows are skipped gracefully when numba is not installed.

Usage::

    python3 benchmarks/bench_kernels.py [--points 4096] [--repeats 200]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from incoupler import kernels_numpy

try:
    from incoupler import kernels_numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on the environment
    kernels_numba = None
    HAVE_NUMBA = False


def make_pair_args(n: int, rng: np.random.Generator):
    atoms = (rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))).astype(
        np.complex128
    )
    lights = (rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))).astype(
        np.complex128
    )
    omega = (rng.normal(size=n) + 1j * rng.normal(size=n)) * 50.0
    w = rng.normal(size=n) * 30.0
    return atoms, lights, omega, w


def bench_pair_rotate(mod, n: int, repeats: int, rng: np.random.Generator) -> float:
    atoms, lights, omega, w = make_pair_args(n, rng)

    def call():
        mod.pair_rotate(atoms, lights, omega, w, 5.0e-6)

    call()  # compile / warm caches outside the timed region
    return min(timeit.repeat(call, number=repeats, repeat=5)) / repeats


def bench_qs_scan(mod, n: int, repeats: int, rng: np.random.Generator) -> float:
    source = (rng.normal(size=n) + 1j * rng.normal(size=n)) * 1.0e2
    w = rng.normal(size=n) * 25.0
    dx = 3.0e-3 / n

    def call():
        mod.qs_scan(source, w, dx, 7.3e-2, 0.0j)

    call()
    return min(timeit.repeat(call, number=repeats, repeat=5)) / repeats


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--points", type=int, default=4096, help="grid size")
    parser.add_argument(
        "--repeats", type=int, default=200, help="calls per timing sample"
    )
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    backends = [("numpy", kernels_numpy)]
    if HAVE_NUMBA:
        backends.append(("numba", kernels_numba))
    else:
        print("numba not installed; timing the numpy kernels only\n")

    rows = []
    for name, mod in backends:
        t_rot = bench_pair_rotate(mod, args.points, args.repeats, rng)
        t_scan = bench_qs_scan(mod, args.points, args.repeats, rng)
        rows.append((name, t_rot, t_scan))

    print(f"kernel timings at n = {args.points} (best of 5 x {args.repeats} calls)")
    print(f"{'backend':<10} {'pair_rotate':>14} {'qs_scan':>14}")
    for name, t_rot, t_scan in rows:
        print(f"{name:<10} {t_rot * 1e6:>11.1f} us {t_scan * 1e6:>11.1f} us")
    if len(rows) == 2:
        print(
            f"{'speedup':<10} {rows[0][1] / rows[1][1]:>12.2f}x "
            f"{rows[0][2] / rows[1][2]:>12.2f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
