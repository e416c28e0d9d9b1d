import math

import numpy as np
import pytest

from nearfield_om.constants import TWO_PI
from nearfield_om.field import (
    CalibrationError,
    OpticalParams,
    ToroidGeometry,
    calibrate_field_model,
    intensity_profile,
    ring_area,
    static_derivatives,
    static_linewidth_shift,
    static_shift,
)
from nearfield_om.numerics import integrate_2d

NM = 1e-9
D1 = TWO_PI * 7e9 / NM
D2 = -TWO_PI * 120e6 / NM**2


@pytest.fixture
def model():
    return calibrate_field_model(D1, D2, 15 * NM)


def test_decay_length(model):
    assert model.L == pytest.approx(7e9 / 120e6 * NM, rel=1e-15)


def test_calibration_point_reproduced(model):
    d1, d2 = static_derivatives(model, 15 * NM)
    assert d1 == pytest.approx(D1, rel=1e-14)
    assert d2 == pytest.approx(D2, rel=1e-14)


def test_static_shift_at_reference(model):
    # -L * omega_s' = -(7/0.12) nm * 7 GHz/nm = -408.3 GHz
    assert static_shift(model, 15 * NM) / TWO_PI / 1e9 == pytest.approx(-7.0 * 7.0 / 0.12, rel=1e-14)


def test_decay_by_e_over_one_length(model):
    assert static_shift(model, 20 * NM) / static_shift(model, 20 * NM + model.L) == pytest.approx(math.e, rel=1e-14)


def test_vectorised_shift(model):
    z = np.linspace(5, 100, 20) * NM
    s = static_shift(model, z)
    assert s.shape == z.shape and np.all(np.diff(np.abs(s)) < 0)


def test_linewidth(model):
    eps = (2.0 + 0.6e-6j) ** 2
    expected = 2 * abs(static_shift(model, 15 * NM)) * eps.imag / (eps.real - 1)
    got = static_linewidth_shift(model, OpticalParams(), 15 * NM)
    assert got == pytest.approx(expected, rel=1e-15)
    assert got / TWO_PI / 1e6 == pytest.approx(0.653, rel=1e-3)


def test_lossless_membrane_adds_no_linewidth(model):
    assert static_linewidth_shift(model, OpticalParams(eps_sin=4.0 + 0j), 15 * NM) == 0.0


def test_ring_area_matches_quadrature():
    r, w = 10e-6, 0.5e-6
    got = integrate_2d(lambda x, y: np.exp(-2 * ((np.hypot(x, y) - r) / w) ** 2), (-12e-6, 12e-6, -12e-6, 12e-6))
    assert got == pytest.approx(ring_area(r, w), rel=1e-6)


def test_intensity_profile_peaks_on_rim(model):
    tor = ToroidGeometry()
    assert intensity_profile(model, tor, tor.radius, 0.0) == 1.0
    assert intensity_profile(model, tor, tor.radius + model.ring_width, 0.0) == pytest.approx(math.exp(-2))


def test_implied_mode_volume_is_positive(model):
    assert 1e-18 < model.V_cav < 1e-12


@pytest.mark.parametrize("d1,d2,z", [(-1.0, D2, 15 * NM), (D1, 1.0, 15 * NM), (D1, D2, 0.0)])
def test_bad_calibration(d1, d2, z):
    with pytest.raises(CalibrationError):
        calibrate_field_model(d1, d2, z)


def test_bad_geometry_and_optics():
    with pytest.raises(ValueError):
        ToroidGeometry(D=2e-6, d=3e-6)
    with pytest.raises(ValueError):
        ToroidGeometry(z0=0.0)
    with pytest.raises(ValueError):
        OpticalParams(eps_sin=0.5 + 0j)
    with pytest.raises(ValueError):
        static_shift(calibrate_field_model(D1, D2, 15 * NM), -1e-9)
