"""Figure and table regeneration: each command turns a :class:`RunConfig` into sweep results.

Sweep points are independent, so they are mapped over a thread pool; rows are
always assembled in input order, so ``threads`` never changes the output.
"""
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import NM, UM
from .constants import TWO_PI
from .coupling import Misalignment, coupling_rates, linear_quadratic_ratio, misalignment_threshold
from .dynamics import (
    DriveConfig,
    control_pulse_photon_threshold,
    drive_photon_number,
    omit_spectrum,
    steady_covariance,
    switching_threshold,
    thermal_occupation,
    transparency_peak,
)
from .field import static_linewidth_shift, static_shift
from .mechanics import MembraneGeometry, MechanicalMode, build_mode, eigenfrequency
from .numerics import BracketError, UnstableDynamicsError
from .output import SweepResult

log = logging.getLogger(__name__)

PM, NRAD = 1e-12, 1e-9


def parallel_map(fn, items, threads=1):
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _linspace(spec):
    start, stop, steps = spec
    return np.linspace(start, stop, steps)


def cmd_modes(cfg, threads=1):
    """Table of membrane modes up to the configured index range."""
    rng = cfg.sweep["modes"]
    pairs = [(j, k) for j in range(1, rng["j_max"] + 1) for k in range(1, rng["k_max"] + 1)]

    def row(jk):
        mode = build_mode(cfg.membrane, jk[0], jk[1], cfg.quality_factor)
        return (jk[0], jk[1], mode.omega_m / TWO_PI / 1e6, mode.m_eff, mode.x_zpf / 1e-15, mode.gamma_m / TWO_PI)

    return [SweepResult(
        "modes",
        ["j_index", "k_index", "omega_m_MHz", "m_eff_kg", "x_zpf_fm", "gamma_m_Hz"],
        parallel_map(row, pairs, threads),
        {"quality_factor": cfg.quality_factor},
    )]


def cmd_static(cfg, threads=1):
    """Static resonance shift and extra linewidth against the gap."""
    spec = cfg.sweep["static"]
    gaps = np.linspace(spec["start_nm"], spec["stop_nm"], spec["steps"])

    def row(z_nm):
        z0 = z_nm * NM
        return (
            float(z_nm),
            abs(static_shift(cfg.field, z0)) / TWO_PI / 1e9,
            static_linewidth_shift(cfg.field, cfg.optics, z0) / TWO_PI / 1e6,
        )

    meta = {
        "field_preset": cfg.field_preset,
        "quantitative_calibration": cfg.field_quantitative,
        "decay_length_nm": cfg.field.L / NM,
    }
    return [SweepResult("static", ["z0_nm", "dws_abs_GHz", "dks_MHz"], parallel_map(row, gaps, threads), meta)]


def cmd_coupling(cfg, threads=1, mode=None):
    """Coupling rates across a grid of membrane sizes (mode frequency from the membrane formula)."""
    j, k = mode or (cfg.j, cfg.k)
    spec = cfg.sweep["coupling"]
    grid = [(lx, ly) for lx in _linspace(spec["lx_um"]) for ly in _linspace(spec["ly_um"])]
    base = cfg.membrane
    gamma = cfg.mode().gamma_m

    def row(sizes):
        lx, ly = sizes
        membrane = MembraneGeometry(l_x=lx * UM, l_y=ly * UM, h=base.h, rho=base.rho, tension=base.tension)
        omega = eigenfrequency(membrane, j, k)
        proto = build_mode(membrane, j, k, 1.0)
        # keep the configured mechanical linewidth fixed across sizes
        m = MechanicalMode(j=j, k=k, omega_m=omega, m_eff=proto.m_eff, x_zpf=proto.x_zpf, gamma_m=gamma)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rates = coupling_rates(m, cfg.field, cfg.toroid, membrane, kappa=cfg.optics.kappa)
        return (
            float(lx), float(ly), omega / TWO_PI / 1e6,
            rates.g1 / TWO_PI / 1e3, rates.g2 / TWO_PI / 1e-3,
            rates.eta1, rates.eta2, rates.cooperativity,
            lx * UM > cfg.toroid.D and ly * UM > cfg.toroid.D,
        )

    cols = ["lx_um", "ly_um", "omega_m_MHz", "g1_kHz", "g2_mHz", "eta1_1", "eta2_1", "cooperativity_1", "ring_valid_bool"]
    return [SweepResult(f"coupling_j{j}k{k}", cols, parallel_map(row, grid, threads), {"mode": [j, k]})]


_PAIRS = {
    "displacement": (("dx", "dy"), PM, "pm"),
    "tilt": (("alpha_x", "alpha_y"), NRAD, "nrad"),
}


def cmd_misalign(cfg, threads=1, mode=None):
    """``|g1/g2|`` map over (dx, dy) or (alpha_x, alpha_y), plus per-axis unity crossings."""
    spec = cfg.sweep["misalign"]
    j, k = mode or tuple(spec.get("mode", (cfg.j, cfg.k)))
    m = cfg.mode(j, k)
    (ax_a, ax_b), scale, unit = _PAIRS[spec["pair"]]
    grid = [(a, b) for a in _linspace(spec["x"]) for b in _linspace(spec["y"])]

    def row(point):
        a, b = point
        mis = Misalignment(**{ax_a: a * scale, ax_b: b * scale})
        return (float(a), float(b), linear_quadratic_ratio(m, cfg.field, cfg.toroid, cfg.membrane, mis))

    cols = [f"{ax_a}_{unit}", f"{ax_b}_{unit}", "ratio_1"]
    ratio_map = SweepResult(f"misalign_{spec['pair']}", cols, parallel_map(row, grid, threads), {"mode": [j, k]})

    thr_rows = []
    for axis in (ax_a, ax_b):
        try:
            value = misalignment_threshold(axis, m, cfg.field, cfg.toroid, cfg.membrane) / scale
            status = "ok"
        except BracketError:
            value, status = math.nan, "not_reached_in_window"
        thr_rows.append((axis, value, status))
    thresholds = SweepResult(f"misalign_{spec['pair']}_thresholds", ["axis_name", f"threshold_{unit}", "status_flag"],
                             thr_rows, {"mode": [j, k]})
    return [ratio_map, thresholds]


def _omit_params(cfg):
    p = cfg.apps["omit"]
    omega_m = TWO_PI * p["omega_m_MHz"] * 1e6
    g1 = TWO_PI * p["g1_kHz"] * 1e3
    kappa = TWO_PI * p["kappa_MHz"] * 1e6
    gamma = TWO_PI * p["gamma_m_Hz"]
    mode = MechanicalMode(j=cfg.j, k=cfg.k, omega_m=omega_m, m_eff=1.0, x_zpf=1.0, gamma_m=gamma)
    drive = DriveConfig(power=0.0, lambda_laser=cfg.optics.lambda0, detuning=omega_m, kappa=kappa, kappa_ext=0.5 * kappa)
    return mode, g1, drive, 4.0 * g1**2 / (kappa * gamma)


def cmd_omit(cfg, threads=1):
    """Transparency peak against intracavity photon number, and the probe spectrum at the inset n."""
    spec = cfg.sweep["omit"]
    mode, g1, drive, coop = _omit_params(cfg)
    ns = np.geomspace(spec["n_start"], spec["n_stop"], spec["steps"])

    def row(n):
        res = omit_spectrum(mode, g1, n, drive, [0.0])
        return (float(n), n * coop, res.peak_transmission, transparency_peak(n, coop), res.regime_ok)

    peaks = SweepResult("omit_peak", ["n_photons", "nC_1", "peak_1", "peak_closed_form_1", "regime_ok_bool"],
                        parallel_map(row, ns, threads), {"cooperativity": coop})

    n0 = spec["inset_n"]
    width = mode.gamma_m * (1.0 + n0 * coop)
    x = np.linspace(-5.0 * width, 5.0 * width, spec["inset_steps"])
    res = omit_spectrum(mode, g1, n0, drive, x)
    rows = [(float(xi / TWO_PI), float(t)) for xi, t in zip(x, res.transmission)]
    spectrum = SweepResult("omit_spectrum", ["probe_detuning_Hz", "transmission_1"], rows,
                           {"n_photons": n0, "peak": res.peak_transmission, "group_delay_s": res.group_delay,
                            "group_delay_closed_form_s": 2.0 / (n0 * coop * mode.gamma_m),
                            "regime_ok": res.regime_ok})
    return [peaks, spectrum]


def cmd_switch(cfg, threads=1):
    """Switching threshold and control-pulse photon count against g1 for each kappa."""
    spec = cfg.sweep["switch"]
    omega_m = TWO_PI * cfg.apps["switch"]["omega_m_MHz"] * 1e6
    points = [(kap, g) for kap in spec["kappa_MHz"] for g in _linspace(spec["g1_kHz"])]

    def row(point):
        kap_mhz, g_khz = point
        kappa, g1 = TWO_PI * kap_mhz * 1e6, TWO_PI * g_khz * 1e3
        return (float(kap_mhz), float(g_khz), switching_threshold(kappa, g1),
                control_pulse_photon_threshold(omega_m, kappa, g1), omega_m > kappa)

    cols = ["kappa_MHz", "g1_kHz", "Nc_photons", "control_photons", "regime_ok_bool"]
    return [SweepResult("switch", cols, parallel_map(row, points, threads))]


def entangle_setup(params):
    """Mode, coupling G and detuning for the entanglement scenario block (config units)."""
    omega_m = TWO_PI * params["omega_m_MHz"] * 1e6
    kappa = TWO_PI * params["kappa_MHz"] * 1e6
    g1 = TWO_PI * params["g1_kHz"] * 1e3
    detuning = params["detuning_over_omega_m"] * omega_m
    drive = DriveConfig(
        power=params["power_uW"] * 1e-6, lambda_laser=params["lambda_nm"] * NM, detuning=detuning,
        kappa=kappa, kappa_ext=params["kappa_ext_over_kappa"] * kappa,
    )
    n = drive_photon_number(drive)
    mode = MechanicalMode(j=1, k=1, omega_m=omega_m, m_eff=1.0, x_zpf=1.0, gamma_m=omega_m / params["Q_m"])
    return mode, math.sqrt(n) * g1, detuning, kappa, n


def entanglement_at(params, temperature):
    mode, G, detuning, kappa, _ = entangle_setup(params)
    n_th = thermal_occupation(mode.omega_m, temperature)
    return steady_covariance(mode, G, detuning, kappa, n_th)


def cmd_entangle(cfg, threads=1):
    """Logarithmic negativity against bath temperature; unstable points are flagged, not dropped."""
    params = cfg.apps["entangle"]
    temps = cfg.sweep["entangle"]["temperatures_K"]
    mode, G, detuning, kappa, n = entangle_setup(params)

    def row(temp):
        n_th = thermal_occupation(mode.omega_m, temp)
        try:
            state = steady_covariance(mode, G, detuning, kappa, n_th)
            return (float(temp), n_th, G / TWO_PI / 1e6, state.E_N, "ok")
        except UnstableDynamicsError:
            log.warning("entangle: dynamics unstable at T = %g K", temp)
            return (float(temp), n_th, G / TWO_PI / 1e6, math.nan, "unstable")

    rows = parallel_map(row, temps, threads)

    # E_N at the hottest point under the conventions the scenario leaves open
    t_hot = max(temps)
    variants = {
        "baseline": {},
        "kappa_ext=kappa": {"kappa_ext_over_kappa": 1.0},
        "detuning=0.8*omega_m": {"detuning_over_omega_m": 0.8},
        "detuning=1.2*omega_m": {"detuning_over_omega_m": 1.2},
        "Q_m=1e7": {"Q_m": 1e7},
    }
    sensitivity = {}
    for label, change in variants.items():
        try:
            sensitivity[label] = entanglement_at({**params, **change}, t_hot).E_N
        except UnstableDynamicsError:
            sensitivity[label] = None
    meta = {"photon_number": n, "G_over_2pi_Hz": G / TWO_PI, "sensitivity_T_K": t_hot, "sensitivity_E_N": sensitivity}
    return [SweepResult("entangle", ["T_K", "n_th_1", "G_MHz", "E_N_1", "status_flag"], rows, meta)]


COMMANDS = {
    "modes": cmd_modes,
    "static": cmd_static,
    "coupling": cmd_coupling,
    "misalign": cmd_misalign,
    "omit": cmd_omit,
    "switch": cmd_switch,
    "entangle": cmd_entangle,
}
