"""Hot inner loops: mode-shape averages around the ring and over the annulus.

Every kernel exists twice: an explicit-loop version compiled with numba and a
vectorised numpy version.  The module-level names (``ring_mode_power`` etc.)
point at whichever backend :mod:`nearfield_om._accel` selected; both sets are
also exposed through ``NUMBA_KERNELS`` / ``NUMPY_KERNELS`` for benchmarks and
the cross-backend tests.

Mode shape convention: ``u(x, y) = sin(j*pi*(x/lx + 1/2)) * sin(k*pi*(y/ly + 1/2))``
on the membrane centred at the origin.  The power ``m`` is 0, 1 or 2.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, maybe_njit

# ---------------------------------------------------------------------------
# loop kernels (numba)
# ---------------------------------------------------------------------------


def _ring_mode_power_loop(theta, radius, lx, ly, j, k, m, dx, dy, ax, ay, decay):
    n = theta.shape[0]
    out = np.empty(n)
    pj = j * math.pi
    pk = k * math.pi
    tilted = ax != 0.0 or ay != 0.0
    for i in range(n):
        xp = radius * math.cos(theta[i]) - dx
        yp = radius * math.sin(theta[i]) - dy
        u = math.sin(pj * (xp / lx + 0.5)) * math.sin(pk * (yp / ly + 0.5))
        v = 1.0
        for _ in range(m):
            v *= u
        if tilted:
            v *= math.exp(-(ax * yp + ay * xp) / decay)
        out[i] = v
    return out


def _ring_mode_power_delta_loop(theta, radius, lx, ly, j, k, m, dx, dy, ax, ay, decay):
    n = theta.shape[0]
    out = np.empty(n)
    pj = j * math.pi
    pk = k * math.pi
    hx = -0.5 * pj * dx / lx
    hy = -0.5 * pk * dy / ly
    shx = math.sin(hx)
    shy = math.sin(hy)
    for i in range(n):
        x = radius * math.cos(theta[i])
        y = radius * math.sin(theta[i])
        a = pj * (x / lx + 0.5)
        b = pk * (y / ly + 0.5)
        sx = math.sin(a)
        sy = math.sin(b)
        dsx = 2.0 * math.cos(a + hx) * shx
        dsy = 2.0 * math.cos(b + hy) * shy
        u0 = sx * sy
        du = dsx * (sy + dsy) + sx * dsy
        em1 = math.expm1(-(ax * (y - dy) + ay * (x - dx)) / decay)
        if m == 0:
            out[i] = em1
        elif m == 1:
            out[i] = du * (1.0 + em1) + u0 * em1
        else:
            out[i] = du * (2.0 * u0 + du) * (1.0 + em1) + u0 * u0 * em1
    return out


def _polar_ring_overlap_loop(r, theta, radius, width, lx, ly, j, k, m):
    nr = r.shape[0]
    nt = theta.shape[0]
    out = np.empty((nr, nt))
    pj = j * math.pi
    pk = k * math.pi
    hx = 0.5 * lx
    hy = 0.5 * ly
    ct = np.cos(theta)
    st = np.sin(theta)
    for a in range(nr):
        rr = r[a]
        d = (rr - radius) / width
        weight = rr * math.exp(-2.0 * d * d)
        for b in range(nt):
            x = rr * ct[b]
            y = rr * st[b]
            if abs(x) > hx or abs(y) > hy:
                out[a, b] = 0.0
                continue
            u = math.sin(pj * (x / lx + 0.5)) * math.sin(pk * (y / ly + 0.5))
            v = weight
            for _ in range(m):
                v *= u
            out[a, b] = v
    return out


# ---------------------------------------------------------------------------
# vectorised kernels (numpy)
# ---------------------------------------------------------------------------


def _ring_mode_power_np(theta, radius, lx, ly, j, k, m, dx, dy, ax, ay, decay):
    xp = radius * np.cos(theta) - dx
    yp = radius * np.sin(theta) - dy
    u = np.sin(j * np.pi * (xp / lx + 0.5)) * np.sin(k * np.pi * (yp / ly + 0.5))
    v = u**m
    if ax != 0.0 or ay != 0.0:
        v = v * np.exp(-(ax * yp + ay * xp) / decay)
    return v


def _ring_mode_power_delta_np(theta, radius, lx, ly, j, k, m, dx, dy, ax, ay, decay):
    x = radius * np.cos(theta)
    y = radius * np.sin(theta)
    hx = -0.5 * j * np.pi * dx / lx
    hy = -0.5 * k * np.pi * dy / ly
    a = j * np.pi * (x / lx + 0.5)
    b = k * np.pi * (y / ly + 0.5)
    sx = np.sin(a)
    sy = np.sin(b)
    # sin(a') - sin(a) without cancellation
    dsx = 2.0 * np.cos(a + hx) * np.sin(hx)
    dsy = 2.0 * np.cos(b + hy) * np.sin(hy)
    u0 = sx * sy
    du = dsx * (sy + dsy) + sx * dsy
    em1 = np.expm1(-(ax * (y - dy) + ay * (x - dx)) / decay)
    if m == 0:
        return em1
    if m == 1:
        return du * (1.0 + em1) + u0 * em1
    return du * (2.0 * u0 + du) * (1.0 + em1) + u0 * u0 * em1


def _polar_ring_overlap_np(r, theta, radius, width, lx, ly, j, k, m):
    rr = r[:, None]
    x = rr * np.cos(theta)[None, :]
    y = rr * np.sin(theta)[None, :]
    weight = rr * np.exp(-2.0 * ((rr - radius) / width) ** 2)
    u = np.sin(j * np.pi * (x / lx + 0.5)) * np.sin(k * np.pi * (y / ly + 0.5))
    inside = (np.abs(x) <= 0.5 * lx) & (np.abs(y) <= 0.5 * ly)
    return np.where(inside, weight * u**m, 0.0)


NUMPY_KERNELS = {
    "ring_mode_power": _ring_mode_power_np,
    "ring_mode_power_delta": _ring_mode_power_delta_np,
    "polar_ring_overlap": _polar_ring_overlap_np,
}

NUMBA_KERNELS = {
    "ring_mode_power": maybe_njit(_ring_mode_power_loop),
    "ring_mode_power_delta": maybe_njit(_ring_mode_power_delta_loop),
    "polar_ring_overlap": maybe_njit(_polar_ring_overlap_loop),
}

_ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS


def _as_args(theta, radius, lx, ly, j, k, m, dx, dy, ax, ay, decay):
    return (
        np.ascontiguousarray(theta, dtype=np.float64),
        float(radius), float(lx), float(ly), int(j), int(k), int(m),
        float(dx), float(dy), float(ax), float(ay), float(decay),
    )


def ring_mode_power(theta, radius, lx, ly, j, k, m, dx=0.0, dy=0.0, ax=0.0, ay=0.0, decay=1.0):
    """``u^m(x', y') * exp(-(ax*y' + ay*x')/decay)`` on the ring of given radius.

    ``x' = radius*cos(theta) - dx`` and ``y' = radius*sin(theta) - dy``.
    """
    return _ACTIVE["ring_mode_power"](*_as_args(theta, radius, lx, ly, j, k, m, dx, dy, ax, ay, decay))


def ring_mode_power_delta(theta, radius, lx, ly, j, k, m, dx=0.0, dy=0.0, ax=0.0, ay=0.0, decay=1.0):
    """Misaligned integrand minus the centred one, evaluated without cancellation.

    Differences of sines use ``sin(a') - sin(a) = 2 cos((a+a')/2) sin((a'-a)/2)``
    and the tilt factor uses ``expm1``, so pm-scale offsets keep full relative
    precision.
    """
    return _ACTIVE["ring_mode_power_delta"](*_as_args(theta, radius, lx, ly, j, k, m, dx, dy, ax, ay, decay))


def polar_ring_overlap(r, theta, radius, width, lx, ly, j, k, m):
    """``r * exp(-2 (r - radius)^2 / width^2) * u^m`` on the (r, theta) tensor grid.

    Points outside the membrane footprint contribute zero.
    """
    return _ACTIVE["polar_ring_overlap"](
        np.ascontiguousarray(r, dtype=np.float64),
        np.ascontiguousarray(theta, dtype=np.float64),
        float(radius), float(width), float(lx), float(ly), int(j), int(k), int(m),
    )
