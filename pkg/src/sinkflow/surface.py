"""Free-surface geometry recovered from a solved ``zeta``.

With ``zeta`` the fixed point, the log-speed and flow-angle traces are::

    tau(sigma)   = log(pi/2) + (1/3) int_0^sigma zeta
    theta(sigma) = (H zeta)(sigma) / 3,        eta = sigma + theta

and the free boundary follows by quadrature of::

    dx/dsigma = -exp(-tau) cos(eta) cot(sigma),   x(pi/2) = 0
    dy/dsigma = -exp(-tau) sin(eta) cot(sigma),   y(0) = 1

Lengths are in units of the far-field depth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FitQualityError, RegimeError, ResolutionError
from .nekrasov import CUSP_ALPHA, DEFAULT_MODES, FlowParams
from .series import (HALF_PI, GridFunction, SineSeries, eval_series,
                     eval_series_derivative, h_apply_spectral,
                     project_to_sine)

LOG_HALF_PI = math.log(HALF_PI)

#: default x-range of the log-log cusp fit
FIT_WINDOW = (1e-6, 1e-2)
MIN_FIT_POINTS = 8
#: the far-field part of dx/dsigma is subtracted below this angle
X_SPLIT = 0.1


@dataclass(frozen=True)
class BoundaryCurve:
    """Free-boundary samples ``(sigma, x, y)``; iterating yields triples."""

    sigma: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __iter__(self):
        return zip(self.sigma.tolist(), self.x.tolist(), self.y.tolist())

    def __len__(self):
        return self.sigma.size


@dataclass(frozen=True)
class CuspFit:
    """Cusp constants and the log-log fit of ``y - y0`` against ``x``.

    ``a`` is the predicted coefficient ``3**(2/3) c0**(1/3) / (2 beta**(2/3))``;
    ``a_sqrt_c0`` is the same expression with ``sqrt(c0)`` in place of
    ``c0**(1/3)``.  ``coefficient`` and ``exponent`` come from a free linear
    fit in log-log space, ``coefficient_fixed`` from a fit with the exponent
    pinned at 2/3.
    """

    beta: float
    c0: float
    a: float
    a_sqrt_c0: float
    y0: float
    exponent: float
    coefficient: float
    coefficient_fixed: float
    window: tuple
    points: int
    x: np.ndarray
    dy: np.ndarray


@dataclass(frozen=True)
class SurfaceSolution:
    """Everything derived from one fixed point."""

    params: FlowParams
    zeta: GridFunction
    tau: GridFunction
    theta: GridFunction
    eta: GridFunction
    boundary: BoundaryCurve
    y0: float
    beta: float
    c0: float
    a: float

    @property
    def speed(self) -> np.ndarray:
        """Surface speed ``(2/pi) exp(tau)``."""
        return np.exp(self.tau.values) / HALF_PI


def _theta_series(zeta: GridFunction, modes: int) -> SineSeries:
    h = h_apply_spectral(project_to_sine(zeta, modes))
    return SineSeries(h.coeffs / 3.0)


def tau_theta(zeta: GridFunction, modes: int = DEFAULT_MODES):
    """Log-speed ``tau`` and flow-angle ``theta`` traces from ``zeta``.

    Returns
    -------
    tau, theta : GridFunction
    """
    grid = zeta.grid
    tau = LOG_HALF_PI + grid.cumulative(zeta.values) / 3.0
    theta = eval_series(_theta_series(zeta, modes), grid.nodes)
    return GridFunction(grid, tau), GridFunction(grid, theta)


def _x_backward(grid, dx):
    """``int_sigma^{pi/2} dx`` with the ``(2/pi)/sigma`` far-field part done exactly.

    Below the node nearest :data:`X_SPLIT` the integrand is split as
    ``(2/pi)(1/s - 1/s_c) + rest``; the first piece is integrated in closed
    form and the bounded rest by the trapezoid rule.  Above ``s_c`` nothing is
    subtracted, so the values near the cusp keep full relative accuracy.
    """
    s = grid.nodes
    c = int(np.argmin(np.abs(s - X_SPLIT)))
    sc = s[c]
    sub = np.where(s < sc, (1.0 / s - 1.0 / sc) / HALF_PI, 0.0)
    exact = np.where(s < sc, (np.log(sc / s) - (sc - s) / sc) / HALF_PI, 0.0)
    return grid.cumulative_from_end(dx - sub) + exact


def boundary_curve(tau: GridFunction, theta: GridFunction, config=None) -> BoundaryCurve:
    """Integrate the free-boundary slopes on the grid of ``tau``.

    ``x`` is accumulated backward from ``x(pi/2) = 0`` so the values near the
    cusp carry no cancellation error.  ``y`` is accumulated forward from
    ``y(0) = 1``; the piece on ``[0, sigma_min]`` uses the integrand at the
    first node, which is the leading Taylor term.  ``config`` is accepted for
    signature symmetry with the solver and is unused: the grid travels with
    the traces.

    Raises
    ------
    ValueError
        ``tau`` and ``theta`` live on different grids.
    ResolutionError
        ``x`` or ``y`` is not strictly decreasing, which means the grid does
        not resolve the surface.
    """
    if tau.grid is not theta.grid:
        raise ValueError("tau and theta must share a grid")
    grid = tau.grid
    s = grid.nodes
    eta = s + theta.values
    cot = np.cos(s) / np.sin(s)
    cot[-1] = 0.0
    scale = np.exp(-tau.values) * cot
    x = _x_backward(grid, scale * np.cos(eta))
    y = 1.0 - grid.cumulative(scale * np.sin(eta))
    for name, v in (("x", x), ("y", y)):
        bad = np.flatnonzero(np.diff(v) >= 0.0)
        if bad.size:
            raise ResolutionError(
                f"{name} is not strictly decreasing near sigma={s[bad[0]]:.6g}; "
                "refine the grid")
    return BoundaryCurve(s.copy(), x, y)


def bernoulli_residual(tau: GridFunction, boundary: BoundaryCurve,
                       params: FlowParams) -> GridFunction:
    """``alpha (4/pi^2) exp(2 tau) + y - (alpha + 1)`` at each node."""
    if tau.values.shape != boundary.y.shape:
        raise ValueError("tau and boundary are sampled differently")
    a = params.alpha
    r = a * np.exp(2.0 * tau.values) / HALF_PI**2 + boundary.y - (a + 1.0)
    return GridFunction(tau.grid, r)


def _cusp_beta(zeta: GridFunction, modes: int) -> float:
    # eta' = 1 + theta', differentiated term by term at pi/2
    return 1.0 + float(eval_series_derivative(_theta_series(zeta, modes), HALF_PI))


def _cusp_a(c0: float, beta: float, power: float) -> float:
    return 3.0 ** (2.0 / 3.0) * c0**power / (2.0 * beta ** (2.0 / 3.0))


def reconstruct_surface(zeta: GridFunction, params: FlowParams,
                        modes: int = DEFAULT_MODES) -> SurfaceSolution:
    """Build :class:`SurfaceSolution` from a solved ``zeta``."""
    tau, theta = tau_theta(zeta, modes)
    boundary = boundary_curve(tau, theta)
    eta = GridFunction(zeta.grid, zeta.grid.nodes + theta.values)
    beta = _cusp_beta(zeta, modes)
    c0 = math.exp(-tau.values[-1])
    return SurfaceSolution(params=params, zeta=zeta, tau=tau, theta=theta,
                           eta=eta, boundary=boundary,
                           y0=float(boundary.y[-1]), beta=beta, c0=c0,
                           a=_cusp_a(c0, beta, 1.0 / 3.0))


def cusp_asymptotics(solution: SurfaceSolution, params: FlowParams | None = None,
                     window=FIT_WINDOW) -> CuspFit:
    """Fit ``y - y0 ~ coefficient * x**exponent`` near the cusp.

    The fit uses nodes with ``window[0] <= x <= window[1]``, with the lower
    edge raised to the smallest positive resolved ``x`` if needed.

    Raises
    ------
    RegimeError
        ``alpha <= 5/sqrt(8)``, where the cusp shape is not established.
    FitQualityError
        Fewer than 8 nodes fall in the window.
    """
    params = params or solution.params
    if not params.cusp_regime:
        raise RegimeError(
            f"cusp asymptotics need alpha > 5/sqrt(8) = {CUSP_ALPHA:.4f}, "
            f"got {params.alpha:g}")
    x = solution.boundary.x[:-1]
    dy = solution.boundary.y[:-1] - solution.y0
    resolved = x[(x > 0) & (dy > 0)]
    lo = max(window[0], float(resolved.min())) if resolved.size else window[0]
    hi = window[1]
    mask = (x >= lo) & (x <= hi) & (dy > 0)
    n = int(np.count_nonzero(mask))
    if n < MIN_FIT_POINTS:
        raise FitQualityError(
            f"only {n} nodes with x in [{lo:.3g}, {hi:.3g}]; need {MIN_FIT_POINTS}")
    lx, ly = np.log(x[mask]), np.log(dy[mask])
    slope, intercept = np.polyfit(lx, ly, 1)
    fixed = float(np.exp(np.mean(ly - 2.0 / 3.0 * lx)))
    c0, beta = solution.c0, solution.beta
    return CuspFit(beta=beta, c0=c0, a=_cusp_a(c0, beta, 1.0 / 3.0),
                   a_sqrt_c0=_cusp_a(c0, beta, 0.5), y0=solution.y0,
                   exponent=float(slope), coefficient=float(np.exp(intercept)),
                   coefficient_fixed=fixed, window=(lo, hi), points=n,
                   x=x[mask].copy(), dy=dy[mask].copy())


def inclination_check(eta: GridFunction):
    """Largest interior inclination and whether the surface never turns over.

    ``ok`` requires every interior value below ``pi/2`` and the value at the
    last node (``sigma = pi/2``) equal to ``pi/2``.
    """
    interior = eta.values[:-1]
    max_interior = float(interior.max())
    ok = max_interior < HALF_PI and abs(eta.values[-1] - HALF_PI) <= 1e-12
    return max_interior, bool(ok)


@dataclass(frozen=True)
class PeriodicTraces:
    """``tau`` and ``theta`` sampled on ``[0, 2 pi]``."""

    sigma: np.ndarray
    tau: np.ndarray
    theta: np.ndarray


def extend_symmetry(tau: GridFunction, theta: GridFunction) -> PeriodicTraces:
    """Extend the traces from ``(0, pi/2]`` to ``[0, 2 pi]``.

    ``tau`` is mirrored evenly and ``theta`` oddly about ``pi/2``; the result
    is then repeated with period ``pi``, which also makes ``tau`` even and
    ``theta`` odd about 0.  The endpoint values ``tau(0) = log(pi/2)`` and
    ``theta(0) = 0`` are prepended.
    """
    s = np.concatenate(([0.0], tau.grid.nodes))
    t = np.concatenate(([LOG_HALF_PI], tau.values))
    th = np.concatenate(([0.0], theta.values))
    # second quarter, dropping the duplicated pi/2 sample
    s_half = np.concatenate((s, np.pi - s[-2::-1]))
    t_half = np.concatenate((t, t[-2::-1]))
    th_half = np.concatenate((th, -th[-2::-1]))
    sigma = np.concatenate((s_half, np.pi + s_half[1:]))
    return PeriodicTraces(sigma=sigma,
                          tau=np.concatenate((t_half, t_half[1:])),
                          theta=np.concatenate((th_half, th_half[1:])))
