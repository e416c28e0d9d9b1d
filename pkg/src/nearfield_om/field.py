"""Calibrated exponential model of the toroid's evanescent field and the static membrane response.

The field above the ``z = 0`` plane is taken as ``|E0(x, y)|^2 exp(-z/L)`` with
a Gaussian ring for the in-plane profile.  The decay length and the absolute
scale are fixed by one calibration point (the gap derivatives of the static
resonance shift), so no electromagnetic solve is needed.
"""
import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, TWO_PI


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class ToroidGeometry:
    D: float = 20e-6
    d: float = 2.4e-6
    z0: float = 15e-9

    def __post_init__(self):
        if not (self.D > self.d > 0):
            raise ValueError(f"toroid needs D > d > 0, got D={self.D!r}, d={self.d!r}")
        if not self.z0 > 0:
            raise ValueError(f"gap z0 must be positive, got {self.z0!r}")

    @property
    def radius(self):
        return 0.5 * self.D


@dataclass(frozen=True)
class OpticalParams:
    lambda0: float = 850e-9
    kappa: float = TWO_PI * 5e6
    eps_sin: complex = (2.0 + 0.6e-6j) ** 2

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise ValueError("lambda0 must be positive")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        eps = complex(self.eps_sin)
        if not (eps.real > 1 and eps.imag >= 0):
            raise ValueError(f"eps_SiN needs Re > 1 and Im >= 0, got {eps!r}")

    @property
    def omega0(self):
        return TWO_PI * C_LIGHT / self.lambda0


@dataclass(frozen=True)
class FieldModel:
    """Calibrated field description.

    Attributes
    ----------
    L : evanescent decay length [m]
    ring_width : 1/e^2 half-width of the in-plane intensity ring [m]
    rel_field : |E0m / Em|, reported only
    A_int : effective interaction area of the ring profile [m^2]
    V_cav : optical mode volume implied by the calibration [m^3]
    omega_s_prime_ref, omega_s_dprime_ref : gap derivatives of the static
        shift at ``z_ref`` [rad/s/m, rad/s/m^2]
    z_ref : calibration gap [m]
    """

    L: float
    ring_width: float
    rel_field: float
    A_int: float
    V_cav: float
    omega_s_prime_ref: float
    omega_s_dprime_ref: float
    z_ref: float

    def __post_init__(self):
        if not (self.L > 0 and self.ring_width > 0 and self.A_int > 0 and self.V_cav > 0):
            raise ValueError("L, ring_width, A_int and V_cav must be positive")
        if not 0 < self.rel_field < 1:
            raise ValueError("rel_field must lie in (0, 1)")


def ring_area(radius, width):
    """Plane integral of ``exp(-2 (r - radius)^2 / width^2)`` for ``width << radius``."""
    return TWO_PI * radius * width * math.sqrt(math.pi / 2.0)


def calibrate_field_model(
    omega_s_prime,
    omega_s_dprime,
    z_ref,
    ring_width=0.5e-6,
    rel_field=0.15,
    *,
    major_diameter=20e-6,
    thickness=50e-9,
    optics=None,
):
    """Build a :class:`FieldModel` from the static shift derivatives at one gap.

    The decay length follows from ``L = omega_s' / |omega_s''|``.  ``V_cav`` is
    the mode volume that makes the first-order perturbation formula reproduce
    the calibrated shift for the given membrane thickness and permittivity;
    it is informational and plays no part in the downstream arithmetic.
    """
    if not omega_s_prime > 0:
        raise CalibrationError(f"omega_s' must be positive, got {omega_s_prime!r}")
    if not omega_s_dprime < 0:
        raise CalibrationError(f"omega_s'' must be negative, got {omega_s_dprime!r}")
    if not z_ref > 0:
        raise CalibrationError("reference gap must be positive")
    optics = optics or OpticalParams()
    decay = omega_s_prime / abs(omega_s_dprime)
    a_int = ring_area(0.5 * major_diameter, ring_width)
    eps = complex(optics.eps_sin)
    v_cav = (
        optics.omega0 * a_int * -math.expm1(-thickness / decay) * (eps.real - 1.0)
        * rel_field**2 * math.exp(-z_ref / decay) / (2.0 * omega_s_prime)
    )
    return FieldModel(
        L=decay,
        ring_width=float(ring_width),
        rel_field=float(rel_field),
        A_int=a_int,
        V_cav=v_cav,
        omega_s_prime_ref=float(omega_s_prime),
        omega_s_dprime_ref=float(omega_s_dprime),
        z_ref=float(z_ref),
    )


def intensity_profile(model, toroid, x, y):
    """In-plane intensity at ``z = 0`` relative to its maximum on the rim."""
    r = np.hypot(x, y)
    out = np.exp(-2.0 * ((r - toroid.radius) / model.ring_width) ** 2)
    return out if np.ndim(out) else float(out)


def static_shift(model, z0):
    """Static resonance shift for a membrane at gap ``z0`` [rad/s, negative]."""
    if not np.all(np.asarray(z0) > 0):
        raise ValueError("gap must be positive")
    out = -model.L * model.omega_s_prime_ref * np.exp(-(np.asarray(z0, dtype=float) - model.z_ref) / model.L)
    return out if out.ndim else float(out)


def static_derivatives(model, z0):
    """First and second gap derivatives of the static shift at ``z0``."""
    shift = static_shift(model, z0)
    return -shift / model.L, shift / model.L**2


def static_linewidth_shift(model, optics, z0):
    """Absorption-only extra linewidth ``2 |dw_s| Im(eps) / (Re(eps) - 1)``."""
    eps = complex(optics.eps_sin)
    if eps.imag < 0:
        raise ValueError("Im(eps) must be non-negative")
    return 2.0 * np.abs(static_shift(model, z0)) * eps.imag / (eps.real - 1.0)
