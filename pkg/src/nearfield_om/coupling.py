"""Bridge coefficients, single-photon coupling rates and misalignment tolerances.

The bridge coefficient ``eta^(m)`` is the intensity-weighted average of the
``m``-th power of the mode shape.  Three variants are provided:

* :func:`eta_ring` -- infinitely thin ring of diameter ``D``;
* :func:`eta_full` -- Gaussian ring of finite width (2-D overlap integral);
* :func:`eta_misaligned` -- thin ring with a displaced and tilted membrane.

``m = 0`` is accepted everywhere and must return 1; it is the normalisation
check.
"""
import math
import warnings
from dataclasses import dataclass

from . import kernels
from .field import static_derivatives
from .numerics import BracketError, QuadratureSpec, find_root, integrate_2d, integrate_periodic

RING_QUADRATURE = QuadratureSpec(node_count=256, abs_tol=1e-15, rel_tol=1e-10)
OVERLAP_QUADRATURE = QuadratureSpec(node_count=64, abs_tol=1e-15, rel_tol=1e-10)

#: radial half-extent of the annulus integrated in :func:`eta_full`, in ring widths
RING_BAND_WIDTHS = 8.0

#: |eta2| below this means no usable quadratic coupling
ETA2_FLOOR = 1e-15

#: search windows for :func:`misalignment_threshold`
DISPLACEMENT_WINDOW = 1e-9  # m
TILT_WINDOW = 1e-6  # rad


@dataclass(frozen=True)
class Misalignment:
    """Offset (``dx``, ``dy``) of the membrane centre and tilts about the x and y axes."""

    dx: float = 0.0
    dy: float = 0.0
    alpha_x: float = 0.0
    alpha_y: float = 0.0

    def __post_init__(self):
        if abs(self.alpha_x) >= 1e-3 or abs(self.alpha_y) >= 1e-3:
            raise ValueError("tilt angles must stay below 1 mrad (small-angle model)")

    def check_against(self, membrane):
        limit = 0.25 * min(membrane.l_x, membrane.l_y)
        if abs(self.dx) >= limit or abs(self.dy) >= limit:
            raise ValueError(f"displacement exceeds the small-offset window of {limit:.3g} m")

    @property
    def is_zero(self):
        return self.dx == 0.0 and self.dy == 0.0 and self.alpha_x == 0.0 and self.alpha_y == 0.0


ALIGNED = Misalignment()


@dataclass(frozen=True)
class CouplingRates:
    eta1: float
    eta2: float
    g1: float  # rad/s
    g2: float  # rad/s
    cooperativity: float
    x_zpf: float
    omega_s_prime: float
    omega_s_dprime: float


def _check_power(m):
    if m not in (0, 1, 2):
        raise ValueError(f"mode-shape power m must be 0, 1 or 2, got {m!r}")


def _warn_small_membrane(membrane, toroid):
    if membrane.l_x <= toroid.D or membrane.l_y <= toroid.D:
        warnings.warn(
            f"membrane ({membrane.l_x:.3g} x {membrane.l_y:.3g} m) does not cover the ring of "
            f"diameter {toroid.D:.3g} m; the ring approximation is outside its validity range",
            stacklevel=3,
        )


def eta_ring(membrane, toroid, j, k, m, spec=RING_QUADRATURE):
    """Ring average ``(1/2pi) * integral u^m(D/2 cos t, D/2 sin t) dt``."""
    _check_power(m)
    _warn_small_membrane(membrane, toroid)
    radius, lx, ly = toroid.radius, membrane.l_x, membrane.l_y
    return integrate_periodic(lambda t: kernels.ring_mode_power(t, radius, lx, ly, j, k, m), spec)


def eta_full(membrane, toroid, field, j, k, m, spec=OVERLAP_QUADRATURE):
    """Overlap of ``u^m`` with the Gaussian-ring intensity, normalised by the interaction area.

    Integrated in polar coordinates over the annulus
    ``|r - D/2| <= RING_BAND_WIDTHS * w`` (the profile is below ``e^-128``
    outside it); lengths are scaled by the ring radius so the tolerances are
    dimensionless.  Tends to :func:`eta_ring` as the width goes to zero.
    """
    _check_power(m)
    _warn_small_membrane(membrane, toroid)
    radius = toroid.radius
    width = field.ring_width / radius
    lx, ly = membrane.l_x / radius, membrane.l_y / radius
    band = (max(0.0, 1.0 - RING_BAND_WIDTHS * width), 1.0 + RING_BAND_WIDTHS * width, 0.0, 2.0 * math.pi)

    def integrand(power):
        return lambda r, t: kernels.polar_ring_overlap(r.ravel(), t.ravel(), 1.0, width, lx, ly, j, k, power)

    area = integrate_2d(integrand(0), band, spec)
    if m == 0:
        return 1.0
    return integrate_2d(integrand(m), band, spec) / area


def eta_misaligned(membrane, toroid, field, j, k, m, mis, spec=RING_QUADRATURE, stable=True):
    """Ring average for a displaced and tilted membrane.

    The integrand is ``u^m(x', y') exp(-(alpha_x y' + alpha_y x')/L)`` with
    ``x' = (D/2) cos t - dx`` and ``y' = (D/2) sin t - dy``.  With
    ``stable=True`` (default) the result is assembled as the aligned average
    plus the average of the difference integrand, which keeps relative
    precision when the offsets are at the picometre scale and the aligned
    term vanishes by symmetry.
    """
    _check_power(m)
    mis.check_against(membrane)
    _warn_small_membrane(membrane, toroid)
    radius, lx, ly, decay = toroid.radius, membrane.l_x, membrane.l_y, field.L
    args = (mis.dx, mis.dy, mis.alpha_x, mis.alpha_y, decay)
    if not stable:
        return integrate_periodic(lambda t: kernels.ring_mode_power(t, radius, lx, ly, j, k, m, *args), spec)
    aligned = integrate_periodic(lambda t: kernels.ring_mode_power(t, radius, lx, ly, j, k, m), spec)
    if mis.is_zero:
        return aligned
    delta = integrate_periodic(lambda t: kernels.ring_mode_power_delta(t, radius, lx, ly, j, k, m, *args), spec)
    return aligned + delta


def cooperativity(g1, kappa, gamma_m):
    """Single-photon cooperativity ``4 g^2 / (kappa gamma_m)``."""
    return 4.0 * g1 * g1 / (kappa * gamma_m)


def coupling_rates(mode, field, toroid, membrane, mis=ALIGNED, kappa=None):
    """Linear and quadratic single-photon coupling rates for one configuration.

    ``g1 = eta1 x_zpf omega_s'`` and ``g2 = -eta2 x_zpf^2 omega_s''`` with
    the static derivatives taken at the toroid gap.  The cooperativity needs
    ``kappa``; it is NaN when ``kappa`` is omitted.
    """
    eta1 = eta_misaligned(membrane, toroid, field, mode.j, mode.k, 1, mis)
    eta2 = eta_misaligned(membrane, toroid, field, mode.j, mode.k, 2, mis)
    d1, d2 = static_derivatives(field, toroid.z0)
    g1 = eta1 * mode.x_zpf * d1
    g2 = -eta2 * mode.x_zpf**2 * d2
    if kappa is None or mode.gamma_m == 0:
        coop = math.nan
    else:
        coop = cooperativity(g1, kappa, mode.gamma_m)
    return CouplingRates(
        eta1=eta1, eta2=eta2, g1=g1, g2=g2, cooperativity=coop,
        x_zpf=mode.x_zpf, omega_s_prime=d1, omega_s_dprime=d2,
    )


def linear_quadratic_ratio(mode, field, toroid, membrane, mis=ALIGNED):
    """``|g1 / g2|`` for the given misalignment."""
    eta1 = eta_misaligned(membrane, toroid, field, mode.j, mode.k, 1, mis)
    eta2 = eta_misaligned(membrane, toroid, field, mode.j, mode.k, 2, mis)
    if abs(eta2) < ETA2_FLOOR:
        raise ValueError("quadratic coupling vanishes for this mode")
    d1, d2 = static_derivatives(field, toroid.z0)
    return abs(eta1 * d1) / abs(eta2 * mode.x_zpf * d2)


_AXES = {
    "dx": ("dx", DISPLACEMENT_WINDOW),
    "dy": ("dy", DISPLACEMENT_WINDOW),
    "alpha_x": ("alpha_x", TILT_WINDOW),
    "alpha_y": ("alpha_y", TILT_WINDOW),
}


def ratio_along(axis, value, mode, field, toroid, membrane):
    """``|g1/g2|`` with a single misalignment component set to ``value``."""
    name, _ = _AXES[axis]
    return linear_quadratic_ratio(mode, field, toroid, membrane, Misalignment(**{name: value}))


def misalignment_threshold(axis, mode, field, toroid, membrane, window=None):
    """Misalignment at which ``|g1/g2|`` crosses 1 along one axis.

    Parameters
    ----------
    axis : {"dx", "dy", "alpha_x", "alpha_y"}
    window : float, optional
        Upper end of the search interval ``[0, window]``; defaults to 1 nm
        for displacements and 1 urad for tilts.

    Raises
    ------
    BracketError
        If the ratio stays below 1 over the whole window (a flat direction).
    """
    if axis not in _AXES:
        raise ValueError(f"unknown misalignment axis {axis!r}; expected one of {sorted(_AXES)}")
    hi = _AXES[axis][1] if window is None else float(window)

    def excess(v):
        return ratio_along(axis, v, mode, field, toroid, membrane) - 1.0

    try:
        return find_root(excess, (0.0, hi))
    except BracketError as exc:
        raise BracketError(f"|g1/g2| does not reach 1 along {axis} within [0, {hi:g}]") from exc
