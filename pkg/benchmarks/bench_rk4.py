"""Timing comparison of the RK4 kernel: numba-jitted vs pure-numpy loop.

Run:  python3 benchmarks/bench_rk4.py [--steps N] [--j-max N]
"""

import argparse
import time

import numpy as np

from rotorkick.core import PulseSpec, RotorBasis, build_hamiltonian
from rotorkick.kernels import HAVE_NUMBA, rk4_loop_jit, rk4_loop_numpy


def bench(fn, a, c0, steps, dt, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(a, c0.copy(), steps, dt)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--j-max", type=int, default=20)
    args = ap.parse_args()

    pulse = PulseSpec(strength=1.5, sigma=3.0)
    h = build_hamiltonian(RotorBasis(args.j_max), pulse).entries
    a = np.ascontiguousarray(-1j * h)
    c0 = np.zeros(args.j_max + 1, dtype=np.complex128)
    c0[0] = 1.0
    dt = 1.0 / args.steps

    print(f"RK4, dim={args.j_max + 1}, steps={args.steps}")
    t_np, out_np = bench(rk4_loop_numpy, a, c0, args.steps, dt)
    print(f"  numpy loop : {t_np:8.3f} s")
    if HAVE_NUMBA:
        rk4_loop_jit(a, c0.copy(), 10, dt)  # compile outside the timing
        t_nb, out_nb = bench(rk4_loop_jit, a, c0, args.steps, dt)
        diff = float(np.max(np.abs(out_np - out_nb)))
        print(f"  numba njit : {t_nb:8.3f} s   (speedup {t_np / t_nb:.1f}x, "
              f"max |diff| {diff:.2e})")
    else:
        print("  numba not available; only the numpy path was timed")


if __name__ == "__main__":
    main()
