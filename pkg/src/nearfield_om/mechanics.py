"""Membrane mechanical eigenmodes: frequency, mode shape, effective mass, zero-point amplitude."""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import HBAR, TWO_PI

#: largest mode index accepted per axis (bounds sweep sizes)
MAX_MODE_INDEX = 50

RHO_SIN = 2700.0  # kg / m^3
TENSION_SIN = 1.0e9  # Pa


@dataclass(frozen=True)
class MembraneGeometry:
    """Rectangular membrane centred on the optical axis (SI units)."""

    l_x: float = 40e-6
    l_y: float = 40e-6
    h: float = 50e-9
    rho: float = RHO_SIN
    tension: float = TENSION_SIN

    def __post_init__(self):
        for name in ("l_x", "l_y", "h", "rho", "tension"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"MembraneGeometry.{name} must be positive, got {value!r}")
        if self.h >= 0.01 * min(self.l_x, self.l_y):
            warnings.warn(
                f"membrane thickness {self.h:.3g} m is not small against its lateral size; "
                "the thin-membrane mode model may be inaccurate",
                stacklevel=3,
            )


@dataclass(frozen=True)
class MechanicalMode:
    j: int
    k: int
    omega_m: float
    m_eff: float
    x_zpf: float
    gamma_m: float

    def __post_init__(self):
        if not (self.omega_m > 0 and self.m_eff > 0 and self.x_zpf > 0):
            raise ValueError("omega_m, m_eff and x_zpf must be positive")
        if self.gamma_m < 0:
            raise ValueError("gamma_m must be non-negative")

    @property
    def quality_factor(self):
        return self.omega_m / self.gamma_m if self.gamma_m > 0 else math.inf


def _check_indices(j, k):
    for name, idx in (("j", j), ("k", k)):
        if int(idx) != idx or idx < 1:
            raise ValueError(f"mode index {name} must be a positive integer, got {idx!r}")
        if idx > MAX_MODE_INDEX:
            raise ValueError(f"mode index {name}={idx} exceeds the cap of {MAX_MODE_INDEX}")


def eigenfrequency(geom, j, k):
    """Angular eigenfrequency of the (j, k) mode of a tensioned membrane [rad/s].

    ``omega/2pi = sqrt(T / 4 rho) * sqrt(j^2/l_x^2 + k^2/l_y^2)``
    """
    _check_indices(j, k)
    return TWO_PI * math.sqrt(geom.tension / (4.0 * geom.rho)) * math.hypot(j / geom.l_x, k / geom.l_y)


def mode_shape(geom, j, k, x, y):
    """Normalised displacement pattern ``u_jk(x, y)``; the membrane spans ``|x| <= l_x/2``, ``|y| <= l_y/2``."""
    _check_indices(j, k)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    # one ulp of slack so that boundary points computed as l/2 are accepted
    if np.any(np.abs(x) > 0.5 * geom.l_x * (1 + 1e-15)) or np.any(np.abs(y) > 0.5 * geom.l_y * (1 + 1e-15)):
        raise ValueError("point lies outside the membrane")
    u = np.sin(j * np.pi * (x / geom.l_x + 0.5)) * np.sin(k * np.pi * (y / geom.l_y + 0.5))
    return u if u.ndim else float(u)


def effective_mass(geom):
    """Effective mass, a quarter of the physical mass for every (j, k)."""
    return geom.rho * geom.l_x * geom.l_y * geom.h / 4.0


def zero_point_amplitude(m_eff, omega_m):
    if m_eff <= 0 or omega_m <= 0:
        raise ValueError("m_eff and omega_m must be positive")
    return math.sqrt(HBAR / (2.0 * m_eff * omega_m))


def build_mode(geom, j, k, quality_factor, omega_m=None):
    """Assemble a :class:`MechanicalMode`.

    ``omega_m`` overrides the membrane formula when a nominal frequency is
    wanted (x_zpf and gamma_m are then derived from the override).
    """
    if not quality_factor > 0:
        raise ValueError(f"quality factor must be positive, got {quality_factor!r}")
    omega = eigenfrequency(geom, j, k) if omega_m is None else float(omega_m)
    m_eff = effective_mass(geom)
    return MechanicalMode(
        j=int(j),
        k=int(k),
        omega_m=omega,
        m_eff=m_eff,
        x_zpf=zero_point_amplitude(m_eff, omega),
        gamma_m=omega / quality_factor,
    )
