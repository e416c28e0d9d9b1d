"""Acceptance suite.  One summary line per criterion is printed at the end of the run."""
import dataclasses
import math

import numpy as np
import pytest
from scipy.special import j0 as scipy_j0

from nearfield_om.constants import TWO_PI
from nearfield_om.coupling import (
    Misalignment,
    cooperativity,
    coupling_rates,
    eta_full,
    eta_ring,
    linear_quadratic_ratio,
    misalignment_threshold,
)
from nearfield_om.commands import entangle_setup
from nearfield_om.dynamics import (
    DriveConfig,
    control_pulse_photon_threshold,
    group_delay,
    omit_spectrum,
    steady_covariance,
    switching_threshold,
    thermal_occupation,
    transparency_peak,
)
from nearfield_om.field import static_derivatives
from nearfield_om.mechanics import MechanicalMode, MembraneGeometry, eigenfrequency, mode_shape
from nearfield_om.numerics import bessel_j0
from nearfield_om.field import ToroidGeometry

pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")

MEM = MembraneGeometry(l_x=40e-6, l_y=40e-6, h=50e-9, rho=2700.0, tension=1e9)
TOR = ToroidGeometry(D=20e-6, d=2.4e-6, z0=15e-9)
TEMPS = (0.1, 1.0, 10.0, 100.0, 300.0)


def rel(a, b):
    return abs(a - b) / abs(b)


# 1 ---------------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_eta_ring_matches_bessel_series():
    ref = bessel_j0(math.sqrt(2) * math.pi / 4)
    assert rel(ref, float(scipy_j0(math.sqrt(2) * math.pi / 4))) < 1e-13
    assert rel(eta_ring(MEM, TOR, 1, 1, 1), ref) <= 1e-6
    assert round(ref, 5) == 0.71456  # J0(sqrt(2) pi / 4) to the printed digits


@pytest.mark.criterion(1)
def test_eta_ring_matches_brute_force_trapezoid():
    theta = np.arange(1_000_000) * (TWO_PI / 1_000_000)
    r = TOR.radius
    brute = np.mean(np.cos(np.pi * r * np.cos(theta) / MEM.l_x) * np.cos(np.pi * r * np.sin(theta) / MEM.l_y))
    assert rel(eta_ring(MEM, TOR, 1, 1, 1), brute) <= 1e-6


# 2 ---------------------------------------------------------------------------

@pytest.mark.criterion(2)
def test_flagship_linear_coupling(cfg):
    mode = cfg.mode()
    rates = coupling_rates(mode, cfg.field, cfg.toroid, cfg.membrane, kappa=cfg.optics.kappa)
    g1_khz = rates.g1 / TWO_PI / 1e3
    assert 18.7 <= g1_khz <= 21.7
    # the chain decomposes exactly
    assert rates.g1 == pytest.approx(rates.eta1 * rates.x_zpf * rates.omega_s_prime, rel=1e-15)


# 3 ---------------------------------------------------------------------------

@pytest.mark.criterion(3)
def test_cooperativity_320():
    c = cooperativity(TWO_PI * 20e3, TWO_PI * 5e6, TWO_PI * 1.0)
    assert rel(c, 320.0) <= 1e-12


# 4 ---------------------------------------------------------------------------

@pytest.mark.criterion(4)
def test_quadratic_coupling_12(cfg):
    rates = coupling_rates(cfg.mode(1, 2), cfg.field, cfg.toroid, cfg.membrane)
    g2_mhz = rates.g2 / TWO_PI / 1e-3
    assert 0.45 <= g2_mhz <= 0.85


# 5 ---------------------------------------------------------------------------

@pytest.mark.criterion(5)
def test_displacement_threshold(cfg):
    dy = misalignment_threshold("dy", cfg.mode(1, 2), cfg.field, cfg.toroid, cfg.membrane)
    assert rel(dy / 1e-12, 0.5) <= 0.3


@pytest.mark.criterion(5)
def test_tilt_threshold(cfg):
    ax = misalignment_threshold("alpha_x", cfg.mode(1, 2), cfg.field, cfg.toroid, cfg.membrane)
    assert rel(ax / 1e-9, 0.3) <= 0.3


@pytest.mark.criterion(5)
@pytest.mark.parametrize("mis", [Misalignment(dx=1e-9), Misalignment(alpha_y=1e-6)], ids=["dx_1nm", "alpha_y_1urad"])
def test_flat_directions(cfg, mis):
    assert linear_quadratic_ratio(cfg.mode(1, 2), cfg.field, cfg.toroid, cfg.membrane, mis) < 0.1


# 6 ---------------------------------------------------------------------------

@pytest.mark.criterion(6)
def test_field_closure_random_gaps(cfg):
    rng = np.random.default_rng(7)
    for z in rng.uniform(1e-9, 300e-9, 100):
        d1, d2 = static_derivatives(cfg.field, float(z))
        assert abs(d2 * cfg.field.L + d1) <= 4 * np.finfo(float).eps * abs(d1)


@pytest.mark.criterion(6)
def test_decay_length(cfg):
    assert rel(cfg.field.L / 1e-9, 58.33) <= 1e-3


# 7 ---------------------------------------------------------------------------

@pytest.mark.criterion(7)
def test_transparency_peak_value():
    assert abs(transparency_peak(0.03, 320.0) - 0.8203) <= 1e-4


@pytest.mark.criterion(7)
def test_spectrum_matches_closed_form():
    kappa, gamma = TWO_PI * 5e6, TWO_PI * 1.0
    g1 = math.sqrt(320.0 * kappa * gamma / 4.0)
    mode = MechanicalMode(j=1, k=1, omega_m=TWO_PI * 10e6, m_eff=1.0, x_zpf=1.0, gamma_m=gamma)
    drive = DriveConfig.critical(0.0, 850e-9, mode.omega_m, kappa)
    for n in np.geomspace(1e-3, 1e2, 51):
        res = omit_spectrum(mode, g1, n, drive, [0.0])
        assert rel(res.peak_transmission, transparency_peak(n, 320.0)) <= 1e-6


@pytest.mark.criterion(7)
def test_group_delay():
    with pytest.warns(UserWarning):
        tau = group_delay(0.03, 320.0, TWO_PI * 1.0)
    assert rel(tau / 1e-3, 33.16) <= 1e-3


# 8 ---------------------------------------------------------------------------

@pytest.mark.criterion(8)
def test_switching_threshold():
    assert rel(switching_threshold(TWO_PI * 3e6, TWO_PI * 30e3), 1.0e4) <= 1e-12


@pytest.mark.criterion(8)
def test_control_photon_threshold():
    n = control_pulse_photon_threshold(TWO_PI * 10e6, TWO_PI * 5e6, TWO_PI * 20e3)
    assert rel(n, 2.656e5) <= 1e-3


# 9 ---------------------------------------------------------------------------

def _ladder(params, temps=TEMPS, G=None):
    mode, G0, detuning, kappa, _ = entangle_setup(params)
    G = G0 if G is None else G
    return [steady_covariance(mode, G, detuning, kappa, thermal_occupation(mode.omega_m, t)) for t in temps]


@pytest.mark.criterion(9)
def test_lyapunov_residual(cfg):
    for state in _ladder(cfg.apps["entangle"]):
        assert state.relative_residual <= 1e-10


@pytest.mark.criterion(9)
def test_no_entanglement_without_coupling(cfg):
    assert all(s.E_N == 0.0 for s in _ladder(cfg.apps["entangle"], G=0.0))


@pytest.mark.criterion(9)
def test_entanglement_non_increasing_in_temperature(cfg):
    e = [s.E_N for s in _ladder(cfg.apps["entangle"])]
    assert all(b <= a for a, b in zip(e, e[1:]))


@pytest.mark.criterion(9)
def test_entanglement_at_room_temperature(cfg):
    (state,) = _ladder(cfg.apps["entangle"], temps=(300.0,))
    assert state.E_N > 0.0


def test_entanglement_room_temperature_soft_target(cfg):
    (state,) = _ladder(cfg.apps["entangle"], temps=(300.0,))
    if state.E_N < 0.03:
        pytest.xfail(f"soft target E_N >= 0.03 not met (E_N = {state.E_N:.4g})")


# 10 --------------------------------------------------------------------------

@pytest.mark.criterion(10)
def test_finite_width_converges_to_ring(cfg):
    ring = eta_ring(MEM, TOR, 1, 1, 1)
    gaps = []
    for div in (25, 50, 100, 200):
        field = dataclasses.replace(cfg.field, ring_width=TOR.D / div)
        gaps.append(abs(eta_full(MEM, TOR, field, 1, 1, 1) - ring) / ring)
    assert gaps[-1] < 1e-3
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


# 11 --------------------------------------------------------------------------

@pytest.mark.criterion(11)
def test_fundamental_frequency():
    f = eigenfrequency(MEM, 1, 1) / TWO_PI / 1e6
    assert rel(f, 10.758) <= 1e-4
    # independent arithmetic: sqrt(T / 4 rho) * sqrt(2) / l
    assert rel(f, math.sqrt(1e9 / (4 * 2700.0)) * math.sqrt(2) / 40e-6 / 1e6) <= 1e-14


@pytest.mark.criterion(11)
def test_mode_shape_vanishes_on_edges():
    s = np.linspace(-0.5, 0.5, 100)
    h = 0.5 * MEM.l_x
    pts = [(s * MEM.l_x, np.full_like(s, -h)), (s * MEM.l_x, np.full_like(s, h)),
           (np.full_like(s, -h), s * MEM.l_y), (np.full_like(s, h), s * MEM.l_y)]
    for j, k in [(1, 1), (1, 2), (3, 5)]:
        for x, y in pts:
            assert np.max(np.abs(mode_shape(MEM, j, k, x, y))) <= 1e-12
