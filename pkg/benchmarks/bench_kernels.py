"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]

Also times the default sweep end to end in two subprocesses, one per path
(``QREPSAT_DISABLE_JIT=0`` and ``=1``).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from qrepsat import _kernels as K


def kernel_cases():
    rng = np.random.default_rng(0)
    a, b = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
    times = np.linspace(-200.0, 200.0, 401)
    sat0 = rng.uniform(-0.2, 0.2, 16)
    gs0 = rng.uniform(-0.2, 0.2, 16)
    nt, nk = 401, 16
    lengths = rng.uniform(1e5, 2e6, (nt, nk, 2))
    zeniths = rng.uniform(0.0, 1.3, (nt, nk, 2))
    kinds = rng.integers(0, 3, (nk, 2)).astype(np.int64)
    apertures = np.full((nk, 2), 0.5)
    eta = rng.uniform(0.0, 1.0, (nt, nk, 2))
    return {
        "klein_convolve": (a, b),
        "nest": (a, 4),
        "station_geometry": (times, sat0, gs0, 1.1e-3, 7.29e-5, 6.371e6, 5e5),
        "arm_transmittance": (lengths, zeniths, kinds, apertures, 0.25, 3.0, 580e-9, 1.1, 0.17),
        "bottleneck": (eta, K.MIN_THEN_AVERAGE),
    }


def bench_kernels(repeat):
    print(f"{'kernel':<20}{'numba us':>12}{'numpy us':>12}{'speedup':>10}")
    for name, args in kernel_cases().items():
        fast, slow = K.NUMBA_KERNELS[name], K.NUMPY_KERNELS[name]
        fast(*args)  # compile
        t_nb = min(timeit.repeat(lambda: fast(*args), number=repeat, repeat=5)) / repeat
        t_np = min(timeit.repeat(lambda: slow(*args), number=repeat, repeat=5)) / repeat
        print(f"{name:<20}{t_nb * 1e6:>12.2f}{t_np * 1e6:>12.2f}{t_np / t_nb:>10.1f}")


def bench_sweep():
    code = ("import time; from qrepsat.cli import sweep_rows;"
            "from qrepsat.config import default_config;"
            "cfg = default_config(); sweep_rows(cfg);"
            "t = time.perf_counter(); sweep_rows(cfg); print(time.perf_counter() - t)")
    for flag, label in (("0", "numba"), ("1", "numpy")):
        env = dict(os.environ, QREPSAT_DISABLE_JIT=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True).stdout
        print(f"default sweep ({label}): {float(out):.3f} s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()
    if not K.HAVE_NUMBA:
        sys.exit("numba is not installed")
    bench_kernels(args.repeat)
    bench_sweep()


if __name__ == "__main__":
    main()
