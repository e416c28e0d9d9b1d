"""Application figures of merit: OMIT switching, drive photon number, thermal
occupation, steady-state optomechanical entanglement and the QND phonon shift.

Covariance conventions
----------------------
Quadratures are ordered ``(q, p, X, Y)``: mechanical position and momentum in
units of ``sqrt(2) x_zpf`` (so ``[q, p] = i``), cavity amplitude and phase
quadratures likewise.  Vacuum variance is 1/2 and ``V_ij = <{u_i, u_j}>/2``.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import C_LIGHT, HBAR, K_B, TWO_PI
from .numerics import lyapunov_residual, relative_lyapunov_residual, solve_lyapunov

#: tolerance on the symplectic-eigenvalue physicality test
PHYSICALITY_TOL = 1e-9


@dataclass(frozen=True)
class DriveConfig:
    """Pump settings.  ``detuning`` is cavity minus pump frequency (positive = red)."""

    power: float
    lambda_laser: float
    detuning: float
    kappa: float
    kappa_ext: float
    n_photons: float | None = None

    def __post_init__(self):
        if not 0 < self.kappa_ext <= self.kappa:
            raise ValueError("need 0 < kappa_ext <= kappa")
        if self.power < 0:
            raise ValueError("power must be non-negative")
        if self.n_photons is not None and self.n_photons < 0:
            raise ValueError("n_photons must be non-negative")

    @classmethod
    def critical(cls, power, lambda_laser, detuning, kappa):
        return cls(power=power, lambda_laser=lambda_laser, detuning=detuning, kappa=kappa, kappa_ext=0.5 * kappa)


@dataclass
class OmitResult:
    peak_transmission: float
    group_delay: float
    probe_detuning: np.ndarray
    transmission: np.ndarray
    regime_ok: bool
    notes: list = field(default_factory=list)

    @property
    def spectrum(self):
        return list(zip(self.probe_detuning.tolist(), self.transmission.tolist()))


@dataclass
class CovarianceState:
    V: np.ndarray
    E_N: float
    n_th: float
    G: float
    drift: np.ndarray
    diffusion: np.ndarray

    @property
    def residual(self):
        return lyapunov_residual(self.drift, self.V, self.diffusion)

    @property
    def relative_residual(self):
        return relative_lyapunov_residual(self.drift, self.V, self.diffusion)


def thermal_occupation(omega_m, temperature):
    """Bose-Einstein occupation of a mode at ``omega_m``; zero at ``T = 0``."""
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega_m / (K_B * temperature))


def drive_photon_number(drive):
    """Mean intracavity photon number ``P kappa_ext / (hbar w_L (Delta^2 + kappa^2/4))``."""
    if drive.n_photons is not None:
        return float(drive.n_photons)
    omega_l = TWO_PI * C_LIGHT / drive.lambda_laser
    return drive.power * drive.kappa_ext / (HBAR * omega_l * (drive.detuning**2 + 0.25 * drive.kappa**2))


def transparency_peak(n, C):
    """Peak probe transmission of the transparency window at critical coupling."""
    if n < 0 or C < 0:
        raise ValueError("n and C must be non-negative")
    x = n * C
    return (x / (x + 1.0)) ** 2


def group_delay(n, C, gamma_m):
    """Probe group delay ``2 / (n C gamma_m)`` inside a wide transparency window."""
    if n * C <= 10.0:
        warnings.warn(f"n*C = {n * C:.3g} is not >> 1; the group-delay formula is outside its regime", stacklevel=2)
    return 2.0 / (n * C * gamma_m)


def control_pulse_photon_threshold(omega_m, kappa, g1):
    """Photons a control pulse must carry to switch: ``(omega_m^2 + kappa^2/4) / g1^2``."""
    if omega_m <= 0 or kappa <= 0 or g1 == 0:
        raise ValueError("omega_m, kappa and g1 must be positive")
    return (omega_m**2 + 0.25 * kappa**2) / g1**2


def switching_threshold(kappa, g1):
    """Switching threshold ``N_c = (kappa / g1)^2``."""
    if kappa <= 0 or g1 == 0:
        raise ValueError("kappa and g1 must be positive")
    return (kappa / g1) ** 2


def omit_regime(omega_m, kappa, G, gamma_m):
    """True inside ``omega_m > kappa > G > gamma_m``."""
    return omega_m > kappa > G > gamma_m


def probe_response(x, G, kappa, kappa_ext, gamma_m):
    """Complex probe transmission amplitude of the side-coupled cavity.

    Red-sideband pump in the resolved-sideband (rotating-wave) limit; ``x``
    is the probe detuning from the cavity resonance.
    """
    x = np.asarray(x, dtype=float)
    cavity = 0.5 * kappa - 1j * x + G**2 / (0.5 * gamma_m - 1j * x)
    return 1.0 - kappa_ext / cavity


def omit_spectrum(mode, g1, n, drive, probe_detunings):
    """Probe power transmission across the transparency window.

    The on-resonance value reproduces :func:`transparency_peak` at critical
    coupling; ``group_delay`` is the slope of the transmitted phase at zero
    probe detuning.
    """
    G = math.sqrt(n) * abs(g1)
    kappa, kappa_ext, gamma_m = drive.kappa, drive.kappa_ext, mode.gamma_m
    x = np.asarray(probe_detunings, dtype=float)
    t = probe_response(x, G, kappa, kappa_ext, gamma_m)
    t0 = probe_response(0.0, G, kappa, kappa_ext, gamma_m)
    # phase slope at x = 0 from a symmetric difference on the window scale
    h = 1e-4 * (gamma_m + 4.0 * G**2 / kappa)
    slope = (np.angle(probe_response(h, G, kappa, kappa_ext, gamma_m))
             - np.angle(probe_response(-h, G, kappa, kappa_ext, gamma_m))) / (2.0 * h)
    ok = omit_regime(mode.omega_m, kappa, G, gamma_m)
    notes = [] if ok else ["outside omega_m > kappa > sqrt(n) g1 > gamma_m"]
    return OmitResult(
        peak_transmission=float(abs(t0) ** 2),
        group_delay=float(slope),
        probe_detuning=x,
        transmission=np.abs(t) ** 2,
        regime_ok=ok,
        notes=notes,
    )


def drift_matrix(omega_m, gamma_m, detuning, kappa, G):
    """Linearised Langevin drift matrix for ``(q, p, X, Y)``.

    The linearised interaction ``hbar G (a + a^dag)(b + b^dag)`` equals
    ``2 hbar G X q`` in these quadratures, hence the ``2 G`` entries.
    """
    return np.array([
        [0.0, omega_m, 0.0, 0.0],
        [-omega_m, -gamma_m, -2.0 * G, 0.0],
        [0.0, 0.0, -0.5 * kappa, detuning],
        [-2.0 * G, 0.0, -detuning, -0.5 * kappa],
    ])


def diffusion_matrix(gamma_m, kappa, n_th):
    return np.diag([0.0, gamma_m * (2.0 * n_th + 1.0), 0.5 * kappa, 0.5 * kappa])


def symplectic_eigenvalues(V):
    """Symplectic eigenvalues of a two-mode covariance matrix (vacuum = 1/2)."""
    V = np.asarray(V, dtype=float)
    omega = np.kron(np.eye(V.shape[0] // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    ev = np.abs(np.linalg.eigvals(1j * omega @ V))
    return np.sort(ev)[::2]


def is_physical(V, tol=PHYSICALITY_TOL):
    V = np.asarray(V, dtype=float)
    if not np.allclose(V, V.T, rtol=0, atol=1e-12 * np.max(np.abs(V))):
        return False
    if np.min(np.linalg.eigvalsh(V)) <= 0:
        return False
    return bool(np.min(symplectic_eigenvalues(V)) >= 0.5 * (1.0 - tol))


def logarithmic_negativity(state):
    """Logarithmic negativity of a two-mode Gaussian state.

    ``E_N = max(0, -ln(2 eta_minus))`` with ``eta_minus`` the smaller
    symplectic eigenvalue of the partial transpose,
    ``eta_minus = sqrt(S - sqrt(S^2 - 4 det V)) / sqrt(2)`` and
    ``S = det A + det B - 2 det C`` for ``V = [[A, C], [C^T, B]]``.

    Accepts a :class:`CovarianceState` or a bare 4x4 matrix.
    """
    V = np.asarray(state.V if isinstance(state, CovarianceState) else state, dtype=float)
    if V.shape != (4, 4):
        raise ValueError("expected a 4x4 covariance matrix")
    if not is_physical(V):
        raise ValueError("covariance matrix is not a physical quantum state")
    a, b, c = V[:2, :2], V[2:, 2:], V[:2, 2:]
    if not np.any(c):
        return 0.0
    s = np.linalg.det(a) + np.linalg.det(b) - 2.0 * np.linalg.det(c)
    disc = max(s * s - 4.0 * np.linalg.det(V), 0.0)
    eta_minus = math.sqrt(max(s - math.sqrt(disc), 0.0) / 2.0)
    return max(0.0, -math.log(2.0 * eta_minus))


def steady_covariance(mode, G, detuning, kappa, n_th):
    """Steady-state covariance of the linearised cavity-membrane system.

    Raises :class:`~nearfield_om.numerics.UnstableDynamicsError` outside the
    stable parameter region.
    """
    if G < 0 or kappa <= 0:
        raise ValueError("need G >= 0 and kappa > 0")
    a = drift_matrix(mode.omega_m, mode.gamma_m, detuning, kappa, G)
    d = diffusion_matrix(mode.gamma_m, kappa, n_th)
    V = solve_lyapunov(a, d)
    state = CovarianceState(V=V, E_N=0.0, n_th=n_th, G=G, drift=a, diffusion=d)
    state.E_N = logarithmic_negativity(state)
    return state


def qnd_shift_per_phonon(g2, phonons=1, omega_m=None, kappa=None):
    """Cavity frequency shift for ``phonons`` added quanta [rad/s].

    From ``H = -hbar g2 (b^dag b + 1/2) a^dag a`` each phonon moves the cavity
    by ``-g2``; the magnitude is ``g2``.  Passing ``omega_m`` and ``kappa``
    checks the resolved-sideband condition the Hamiltonian relies on.
    """
    if omega_m is not None and kappa is not None and not omega_m > kappa:
        warnings.warn("omega_m <= kappa: the resolved-sideband QND Hamiltonian does not apply", stacklevel=2)
    return -g2 * phonons
