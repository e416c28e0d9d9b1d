import os
import subprocess
import sys

import numpy as np
import pytest

from nearfield_om import kernels
from nearfield_om._accel import DISABLE_ENV, HAVE_NUMBA

RING_ARGS = (10e-6, 40e-6, 45e-6, 1, 2)
MIS = (3e-12, -2e-12, 1e-10, -4e-10, 58e-9)

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not importable")


@pytest.mark.parametrize("m", [0, 1, 2])
def test_ring_kernels_agree(m):
    theta = np.linspace(0, 2 * np.pi, 513)[:-1]
    for name in ("ring_mode_power", "ring_mode_power_delta"):
        a = kernels.NUMBA_KERNELS[name](theta, *RING_ARGS, m, *MIS)
        b = kernels.NUMPY_KERNELS[name](theta, *RING_ARGS, m, *MIS)
        assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_polar_kernel_agrees(m):
    r = np.linspace(0.9, 1.1, 17)
    t = np.linspace(0, 2 * np.pi, 33)
    a = kernels.NUMBA_KERNELS["polar_ring_overlap"](r, t, 1.0, 0.05, 4.0, 4.5, 2, 1, m)
    b = kernels.NUMPY_KERNELS["polar_ring_overlap"](r, t, 1.0, 0.05, 4.0, 4.5, 2, 1, m)
    assert a.shape == b.shape == (17, 33)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


def test_delta_matches_difference_at_large_offset():
    theta = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    mis = (2e-7, 1e-7, 1e-5, 2e-5, 58e-9)
    full = kernels.ring_mode_power(theta, *RING_ARGS, 1, *mis)
    base = kernels.ring_mode_power(theta, *RING_ARGS, 1)
    delta = kernels.ring_mode_power_delta(theta, *RING_ARGS, 1, *mis)
    assert np.allclose(delta, full - base, rtol=1e-9, atol=1e-15)


def test_env_flag_selects_numpy():
    code = "from nearfield_om import _accel, kernels; print(_accel.backend_name(), kernels._ACTIVE is kernels.NUMPY_KERNELS)"
    env = {**os.environ, DISABLE_ENV: "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out.split() == ["numpy", "True"]
