"""Time the numba kernels against the pure-numpy ones.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are timed in one process; numba compilation happens in a
warm-up call and is reported separately.
"""
import argparse
import time

import numpy as np

from nearfield_om import kernels
from nearfield_om._accel import HAVE_NUMBA


def cases():
    theta = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
    ring = (theta, 10e-6, 40e-6, 40e-6, 1, 2, 2, 3e-13, -2e-13, 1e-10, 2e-10, 58e-9)
    r = np.linspace(0.6, 1.4, 512)
    t = np.linspace(0.0, 2 * np.pi, 1024)
    polar = (r, t, 1.0, 0.05, 4.0, 4.0, 1, 2, 2)
    return {"ring_mode_power": ring, "ring_mode_power_delta": ring, "polar_ring_overlap": polar}


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not importable; only the numpy backend is available")
        return
    print(f"{'kernel':<24}{'compile_s':>11}{'numba_us':>11}{'numpy_us':>11}{'speedup':>9}")
    for name, a in cases().items():
        jit, ref = kernels.NUMBA_KERNELS[name], kernels.NUMPY_KERNELS[name]
        t0 = time.perf_counter()
        out = jit(*a)
        compile_s = time.perf_counter() - t0
        assert np.allclose(out, ref(*a), rtol=1e-12, atol=1e-300)
        t_jit = best_of(jit, a, args.repeat)
        t_np = best_of(ref, a, args.repeat)
        print(f"{name:<24}{compile_s:>11.3f}{t_jit * 1e6:>11.1f}{t_np * 1e6:>11.1f}{t_np / t_jit:>9.2f}")


if __name__ == "__main__":
    main()
