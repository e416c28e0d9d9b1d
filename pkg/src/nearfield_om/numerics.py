"""Shared numerical kernels: quadrature, Bessel J0, Lyapunov solve, root finding."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

#: node doubling stops here for the periodic rule
PERIODIC_NODE_CAP = 2**16
#: per-axis cap for the tensor-product rule (16.7M points at the cap)
TENSOR_NODE_CAP = 2**12

_GL_ORDER = 8
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


class QuadratureError(RuntimeError):
    """Refinement hit the node cap before two successive estimates agreed."""

    def __init__(self, message, estimates):
        super().__init__(f"{message} (last estimates: {estimates[0]!r}, {estimates[1]!r})")
        self.estimates = estimates


class BracketError(ValueError):
    """The root-finding bracket does not enclose a sign change."""


class UnstableDynamicsError(RuntimeError):
    """The drift matrix has an eigenvalue with non-negative real part."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Starting node count and stopping tolerances for adaptive quadrature.

    Refinement stops once two successive estimates differ by at most
    ``max(abs_tol, rel_tol * |estimate|)``.
    """

    node_count: int = 64
    abs_tol: float = 1e-15
    rel_tol: float = 1e-10

    def __post_init__(self):
        if int(self.node_count) != self.node_count or self.node_count < 8 or self.node_count % 2:
            raise ValueError(f"node_count must be an even integer >= 8, got {self.node_count!r}")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one of abs_tol, rel_tol must be positive")

    def converged(self, new, old):
        return abs(new - old) <= max(self.abs_tol, self.rel_tol * abs(new))


DEFAULT_QUADRATURE = QuadratureSpec()


def integrate_periodic(f, spec=DEFAULT_QUADRATURE):
    """Average of a 2*pi-periodic function, ``(1/2pi) * integral_0^{2pi} f``.

    Uses the equal-spaced trapezoid rule, which is spectrally accurate for
    smooth periodic integrands and exact for trigonometric polynomials of
    degree below the node count.  Nodes are doubled (re-using the previous
    ones) until successive estimates agree.

    Parameters
    ----------
    f : callable
        Vectorised function of an angle array, returning an array of the same
        shape.
    spec : QuadratureSpec

    Raises
    ------
    QuadratureError
        If the estimates have not agreed by ``PERIODIC_NODE_CAP`` nodes.
    """
    n = spec.node_count
    theta = 2.0 * np.pi * np.arange(n) / n
    values = np.asarray(f(theta), dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("integrand is not finite on the quadrature nodes")
    estimate = values.mean()
    previous = math.nan
    while True:
        if 2 * n > PERIODIC_NODE_CAP:
            raise QuadratureError(f"periodic quadrature did not converge by {n} nodes", (previous, estimate))
        # new nodes sit halfway between the old ones
        theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
        values = np.asarray(f(theta), dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError("integrand is not finite on the quadrature nodes")
        previous, estimate = estimate, 0.5 * (estimate + values.mean())
        n *= 2
        if spec.converged(estimate, previous):
            return float(estimate)


def _composite_gauss(lo, hi, n_nodes):
    panels = max(1, n_nodes // _GL_ORDER)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def integrate_2d(f, domain, spec=DEFAULT_QUADRATURE):
    """Integral of ``f(x, y)`` over the rectangle ``domain = (x0, x1, y0, y1)``.

    Tensor product of composite 8-point Gauss-Legendre rules; the panel count
    per axis doubles until successive estimates agree.  ``f`` is called with
    broadcastable arrays of shape ``(n, 1)`` and ``(1, n)``.

    Raises
    ------
    QuadratureError
        If the estimates have not agreed by ``TENSOR_NODE_CAP`` nodes per axis.
    """
    x0, x1, y0, y1 = (float(v) for v in domain)
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"degenerate integration rectangle {domain!r}")

    def rule(n):
        xs, wx = _composite_gauss(x0, x1, n)
        ys, wy = _composite_gauss(y0, y1, n)
        values = np.broadcast_to(np.asarray(f(xs[:, None], ys[None, :]), dtype=float), (xs.size, ys.size))
        if not np.all(np.isfinite(values)):
            raise ValueError("integrand is not finite on the quadrature nodes")
        return float(wx @ values @ wy)

    n = max(spec.node_count, _GL_ORDER)
    estimate = rule(n)
    previous = math.nan
    while True:
        n *= 2
        if n > TENSOR_NODE_CAP:
            raise QuadratureError(f"2-D quadrature did not converge by {n // 2} nodes per axis", (previous, estimate))
        previous, estimate = estimate, rule(n)
        if spec.converged(estimate, previous):
            return estimate


def _j0_series(x):
    q = -0.25 * x * x
    term = 1.0
    terms = [term]
    k = 1
    while True:
        term *= q / (k * k)
        terms.append(term)
        if abs(term) < 1e-18:
            break
        k += 1
    return math.fsum(terms)


def _j0_miller(x):
    # backward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalised by
    # J0 + 2*(J2 + J4 + ...) = 1
    start = 2 * ((int(1.5 * x) + 40) // 2)
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    j0 = 0.0
    for n in range(start, 0, -1):
        j_prev = (2.0 * n / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_next *= 1e-250
            norm *= 1e-250
        if (n - 1) % 2 == 0 and n - 1 > 0:
            norm += 2.0 * j_cur
        if n - 1 == 0:
            j0 = j_cur
    return j0 / (norm + j0)


def bessel_j0(x):
    """Bessel function of the first kind of order zero, for ``|x| < 50``.

    Power series (compensated summation) for ``|x| <= 8``; Miller's backward
    recurrence beyond.
    """
    x = abs(float(x))
    if not x < 50.0:
        raise ValueError(f"bessel_j0 is implemented for |x| < 50, got {x!r}")
    if x <= 8.0:
        return _j0_series(x)
    return _j0_miller(x)


def solve_lyapunov(a, d):
    """Solve ``A V + V A^T + D = 0`` for symmetric ``V``.

    The equation is rewritten as the ``n^2 x n^2`` linear system
    ``(I kron A + A kron I) vec(V) = -vec(D)`` and solved densely; the
    problems here are 4x4, so this costs nothing.

    Raises
    ------
    UnstableDynamicsError
        If ``A`` is not Hurwitz.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or d.shape != (n, n):
        raise ValueError("A and D must be square matrices of the same size")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(d))):
        raise ValueError("A and D must have finite entries")
    eig = np.linalg.eigvals(a)
    if np.max(eig.real) >= 0.0:
        raise UnstableDynamicsError(f"drift matrix is not Hurwitz (max Re eigenvalue {np.max(eig.real):.6g})")
    # rescale rates to O(1) before the solve
    scale = np.max(np.abs(a))
    ident = np.eye(n)
    system = (np.kron(ident, a) + np.kron(a, ident)) / scale
    vec = np.linalg.solve(system, -d.reshape(-1, order="F") / scale)
    v = vec.reshape((n, n), order="F")
    return 0.5 * (v + v.T)


def lyapunov_residual(a, v, d):
    """Frobenius norm of ``A V + V A^T + D``."""
    return float(np.linalg.norm(a @ v + v @ a.T + d))


def relative_lyapunov_residual(a, v, d):
    """Residual normalised by the size of the terms it balances, ``2 |A| |V| + |D|``."""
    scale = 2.0 * np.linalg.norm(a) * np.linalg.norm(v) + np.linalg.norm(d)
    return lyapunov_residual(a, v, d) / scale


def find_root(f, bracket, xtol_rel=1e-12):
    """Root of a scalar function with a sign change on ``bracket = (lo, hi)``.

    Brent's method (bisection safeguarded secant / inverse quadratic steps).
    The returned root is located to within ``xtol_rel * |hi - lo|``.
    """
    lo, hi = (float(v) for v in bracket)
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if not (np.isfinite(f_lo) and np.isfinite(f_hi)) or f_lo * f_hi > 0.0:
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f = ({f_lo!r}, {f_hi!r})")
    return brentq(f, lo, hi, xtol=xtol_rel * abs(hi - lo), rtol=4 * np.finfo(float).eps, maxiter=500)
