"""Kernel ``K(s, sigma) = log|sin(s+sigma)/sin(s-sigma)|`` and the smoothing
operator ``H w = (1/pi) int_0^{pi/2} K(s, .) w(s) ds``.

``H`` is diagonal on the basis ``{sin 2k sigma}``: mode ``k`` is scaled by
``1/(2k)``.  The spectral route (:func:`project_to_sine`,
:func:`h_apply_spectral`, :func:`eval_series`) is what the solver uses;
:func:`h_apply_direct` evaluates the integral by quadrature with singularity
subtraction and exists to check the spectral route.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import spence

from .errors import AliasingError, DomainError, SingularKernelError

HALF_PI = 0.5 * np.pi

# |s - sigma| below which the tangent form of the kernel is used
_TAN_BRANCH_WIDTH = 0.1


# ---------------------------------------------------------------------------
# Grid and grid functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Grid:
    """Graded node set on ``(0, pi/2]`` with trapezoid-type weights.

    The first weight also covers ``[0, nodes[0]]`` (rectangle rule), so the
    weights sum to ``pi/2`` and :meth:`cumulative` is exact for constants.
    Instances compare and hash by identity; build them with
    :func:`make_grid`, which caches.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def sigma_min(self) -> float:
        return float(self.nodes[0])

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    def norm(self, values) -> float:
        """L2(0, pi/2) norm by grid quadrature."""
        values = np.asarray(values, dtype=float)
        return float(np.sqrt(np.dot(self.weights, values * values)))

    def cumulative(self, values) -> np.ndarray:
        """Running integral ``int_0^{sigma_j} f`` at every node."""
        values = np.asarray(values, dtype=float)
        s = self.nodes
        out = np.empty_like(values)
        out[0] = s[0] * values[0]
        out[1:] = out[0] + np.cumsum(0.5 * np.diff(s) * (values[1:] + values[:-1]))
        return out

    def cumulative_from_end(self, values) -> np.ndarray:
        """Running integral ``int_{sigma_j}^{pi/2} f`` at every node."""
        values = np.asarray(values, dtype=float)
        pieces = 0.5 * np.diff(self.nodes) * (values[1:] + values[:-1])
        out = np.zeros_like(values)
        out[:-1] = np.cumsum(pieces[::-1])[::-1]
        return out


def _node_density_cdf(sigma, sigma_min, frac_log, frac_edge):
    """Normalised node-count function; node density is
    ``a/sigma + b + c/sqrt(pi/2 - sigma)``."""
    a = frac_log / np.log(HALF_PI / sigma_min)
    c = frac_edge / (2.0 * np.sqrt(HALF_PI - sigma_min))
    b = (1.0 - frac_log - frac_edge) / (HALF_PI - sigma_min)
    return (a * np.log(sigma / sigma_min) + b * (sigma - sigma_min)
            + 2.0 * c * (np.sqrt(HALF_PI - sigma_min) - np.sqrt(HALF_PI - sigma)))


@lru_cache(maxsize=32)
def make_grid(nodes: int = 2048, sigma_min: float = 1e-4, *,
              frac_log: float = 0.15, frac_edge: float = 0.15) -> Grid:
    """Build the graded grid used throughout.

    Node density is the sum of a geometric part (``~1/sigma``, resolves the
    ``cot`` singularity at 0), a uniform part, and a Chebyshev-like part
    (``~1/sqrt(pi/2 - sigma)``) that clusters nodes at the cusp.  The first
    node is ``sigma_min`` and the last is exactly ``pi/2``.

    Parameters
    ----------
    nodes : int
        Number of nodes ``M``.
    sigma_min : float
        Smallest node, ``0 < sigma_min < pi/2``.
    frac_log, frac_edge : float
        Fractions of the nodes spent on the geometric and cusp-side parts.
    """
    if nodes < 8:
        raise ValueError("a grid needs at least 8 nodes")
    if not 0.0 < sigma_min < 0.1:
        raise ValueError("sigma_min must lie in (0, 0.1)")
    if frac_log < 0 or frac_edge < 0 or frac_log + frac_edge >= 1:
        raise ValueError("density fractions must be nonnegative and sum below 1")
    target = np.linspace(0.0, 1.0, nodes)
    lo = np.full(nodes, sigma_min)
    hi = np.full(nodes, HALF_PI)
    # bisection on a monotone map; 200 halvings exhaust double precision
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = _node_density_cdf(mid, sigma_min, frac_log, frac_edge) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    s = 0.5 * (lo + hi)
    s[0] = sigma_min
    s[-1] = HALF_PI
    if np.any(np.diff(s) <= 0):
        raise ValueError("grid nodes are not strictly increasing; "
                         "use fewer nodes or a larger sigma_min")
    gaps = np.diff(np.concatenate(([0.0], s)))
    w = np.zeros_like(s)
    w[0] = gaps[0]
    w[:-1] += 0.5 * gaps[1:]
    w[1:] += 0.5 * gaps[1:]
    return Grid(nodes=s, weights=w)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values of a function at the nodes of a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ValueError("values must have one entry per grid node")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid: Grid, f) -> "GridFunction":
        return cls(grid, f(grid.nodes))

    @property
    def sigma(self) -> np.ndarray:
        return self.grid.nodes

    def norm(self) -> float:
        return self.grid.norm(self.values)

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            if other.grid is not self.grid:
                raise ValueError("grid functions live on different grids")
            other = other.values
        return GridFunction(self.grid, self.values - other)

    def __add__(self, other):
        if isinstance(other, GridFunction):
            if other.grid is not self.grid:
                raise ValueError("grid functions live on different grids")
            other = other.values
        return GridFunction(self.grid, self.values + other)

    def __len__(self):
        return self.values.size


# ---------------------------------------------------------------------------
# Sine series
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SineSeries:
    """Coefficients ``c_k`` of ``sum_k c_k sin(2 k sigma)``, ``k = 1..N``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size < 1:
            raise ValueError("a sine series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("sine coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def mode(cls, k: int, modes: int | None = None, amplitude: float = 1.0):
        """Single-mode series ``amplitude * sin(2 k sigma)``."""
        modes = k if modes is None else modes
        c = np.zeros(modes)
        c[k - 1] = amplitude
        return cls(c)

    @property
    def modes(self) -> int:
        return self.coeffs.size

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(1, self.coeffs.size + 1)

    def norm(self) -> float:
        """L2(0, pi/2) norm by Parseval: ``sqrt(pi/4 * sum c_k^2)``."""
        return float(np.sqrt(0.25 * np.pi * np.dot(self.coeffs, self.coeffs)))

    def __call__(self, sigma):
        return eval_series(self, sigma)


def _check_closed_interval(sigma, name="sigma"):
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < 0.0) or np.any(sigma > HALF_PI) or np.any(~np.isfinite(sigma)):
        raise DomainError(f"{name} must lie in [0, pi/2]")
    return sigma


def _sine_matrix(sigma, modes):
    """``sin(2 k sigma)`` with rows exactly zero at ``sigma in {0, pi/2}``."""
    k = np.arange(1, modes + 1)
    S = np.sin(2.0 * np.multiply.outer(sigma, k))
    S[(sigma == 0.0) | (sigma == HALF_PI)] = 0.0
    return S


def eval_series(w: SineSeries, sigma):
    """Evaluate ``sum c_k sin(2 k sigma)``; exactly 0 at both ends."""
    sigma = _check_closed_interval(sigma)
    out = _sine_matrix(sigma, w.modes) @ w.coeffs
    return float(out) if out.ndim == 0 else out


def eval_series_derivative(w: SineSeries, sigma):
    """Evaluate the term-wise derivative ``sum 2k c_k cos(2 k sigma)``."""
    sigma = _check_closed_interval(sigma)
    k = w.wavenumbers
    out = np.cos(2.0 * np.multiply.outer(sigma, k)) @ (2.0 * k * w.coeffs)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=16)
def spectral_basis(grid: Grid, modes: int):
    """Synthesis matrix ``S`` (nodes x modes) and weighted least-squares
    analysis matrix ``P`` (modes x nodes) for a grid, cached per pair."""
    if modes > grid.size // 2:
        raise AliasingError(
            f"{modes} modes need at least {2 * modes} nodes, grid has {grid.size}")
    S = _sine_matrix(grid.nodes, modes)
    root_w = np.sqrt(grid.weights)
    P = np.linalg.pinv(root_w[:, None] * S) * root_w[None, :]
    S.setflags(write=False)
    P.setflags(write=False)
    return S, P


def project_to_sine(f: GridFunction, modes: int) -> SineSeries:
    """Sine coefficients of a grid function.

    Computed as the weighted least-squares fit in the span of the first
    ``modes`` sine modes, which coincides with the quadrature projection
    ``(4/pi) int f sin(2ks)`` as the grid is refined and reproduces band-limited
    inputs exactly.

    Raises
    ------
    AliasingError
        If ``modes`` exceeds half the node count.
    """
    _, P = spectral_basis(f.grid, int(modes))
    return SineSeries(P @ f.values)


def h_apply_spectral(w: SineSeries) -> SineSeries:
    """Apply ``H`` on the sine basis: ``c_k -> c_k / (2k)``."""
    return SineSeries(w.coeffs / (2.0 * w.wavenumbers))


# ---------------------------------------------------------------------------
# Kernel
# ---------------------------------------------------------------------------

def kernel_closed(s, sigma):
    """``K(s, sigma) = log|sin(s+sigma) / sin(s-sigma)|``.

    Near the diagonal the equivalent tangent form
    ``log|(tan s + tan sigma)/(tan s - tan sigma)|`` is used; the sine form
    everywhere else (including near ``pi/2``, where ``tan`` overflows).

    Raises
    ------
    SingularKernelError
        If ``s == sigma`` anywhere (the kernel is ``+inf`` there).
    """
    s, sigma = np.broadcast_arrays(np.asarray(s, dtype=float),
                                   np.asarray(sigma, dtype=float))
    if np.any(s == sigma):
        raise SingularKernelError("K(s, sigma) is infinite for s == sigma")
    out = np.empty(s.shape)
    near = (np.abs(s - sigma) < _TAN_BRANCH_WIDTH) & (np.maximum(s, sigma) < HALF_PI - 0.05)
    if np.any(near):
        ts, tg = np.tan(s[near]), np.tan(sigma[near])
        out[near] = np.log(np.abs((ts + tg) / (ts - tg)))
    far = ~near
    if np.any(far):
        with np.errstate(divide="ignore", invalid="ignore"):
            out[far] = (np.log(np.abs(np.sin(s[far] + sigma[far])))
                        - np.log(np.abs(np.sin(s[far] - sigma[far]))))
    # K vanishes identically on the edges of the square
    edge = (s == 0.0) | (sigma == 0.0) | (s == HALF_PI) | (sigma == HALF_PI)
    out[edge] = 0.0
    return float(out) if out.ndim == 0 else out


def kernel_series(s, sigma, terms: int):
    """Partial sum ``2 sum_{k<=terms} sin(2k sigma) sin(2k s) / k``."""
    if terms < 1:
        raise ValueError("terms must be a positive integer")
    s, sigma = np.broadcast_arrays(np.asarray(s, dtype=float),
                                   np.asarray(sigma, dtype=float))
    k = np.arange(1, terms + 1)
    flat_s, flat_g = s.ravel(), sigma.ravel()
    out = np.empty(flat_s.size)
    step = max(1, 2_000_000 // terms)
    for i in range(0, flat_s.size, step):
        ss = np.multiply.outer(flat_s[i:i + step], 2.0 * k)
        gg = np.multiply.outer(flat_g[i:i + step], 2.0 * k)
        out[i:i + step] = 2.0 * np.sum(np.sin(ss) * np.sin(gg) / k, axis=1)
    out = out.reshape(s.shape)
    return float(out) if out.ndim == 0 else out


def clausen2(x):
    """Clausen function ``Cl_2(x) = Im Li_2(exp(ix))``."""
    x = np.asarray(x, dtype=float)
    # scipy's spence(z) is Li_2(1 - z)
    out = np.imag(spence(1.0 - np.exp(1j * x)))
    return float(out) if out.ndim == 0 else out


def kernel_moment(sigma):
    """``int_0^{pi/2} K(s, sigma) ds = Cl_2(2 sigma) + Cl_2(pi - 2 sigma)``.

    Follows from ``int log|2 sin x| dx = -Cl_2(2x)/2`` applied to the two
    logarithms of the closed-form kernel.
    """
    sigma = np.asarray(sigma, dtype=float)
    return clausen2(2.0 * sigma) + clausen2(np.pi - 2.0 * sigma)


# Gauss-Legendre rule on [0, 1] for the graded side integrals
_GL_U, _GL_W = np.polynomial.legendre.leggauss(200)
_GL_U = 0.5 * (_GL_U + 1.0)
_GL_W = 0.5 * _GL_W
_GRADING = 4  # offsets d = L * u**4 cluster nodes at the singular point


def h_apply_direct(w: GridFunction, sigma):
    """Evaluate ``(Hw)(sigma)`` by direct quadrature.

    The grid values are interpolated by a cubic spline ``v``; then::

        pi (Hw)(sigma) = int K(s, sigma) (v(s) - v(sigma)) ds
                         + v(sigma) * int K(s, sigma) ds

    The first integrand is continuous; it is integrated on each side of
    ``sigma`` with Gauss-Legendre nodes graded towards ``sigma``.  The kernel
    moment is evaluated in closed form (:func:`kernel_moment`).

    Raises
    ------
    DomainError
        If ``sigma`` lies outside ``(0, pi/2]``.
    """
    sig = np.asarray(sigma, dtype=float)
    if np.any(sig <= 0.0) or np.any(sig > HALF_PI) or np.any(~np.isfinite(sig)):
        raise DomainError("sigma must lie in (0, pi/2]")
    flat = np.atleast_1d(sig).ravel()
    spline = CubicSpline(w.grid.nodes, w.values, extrapolate=True)
    v0 = spline(flat)
    total = np.zeros(flat.size)
    u_pow = _GL_U ** _GRADING
    du = _GRADING * _GL_U ** (_GRADING - 1) * _GL_W
    for side in (-1.0, 1.0):
        length = flat if side < 0 else HALF_PI - flat
        d = np.multiply.outer(length, u_pow)           # offsets from sigma
        jac = np.multiply.outer(length, du)
        s = flat[:, None] + side * d
        with np.errstate(divide="ignore", invalid="ignore"):
            kern = (np.log(np.abs(np.sin(2.0 * flat[:, None] + side * d)))
                    - np.log(np.abs(np.sin(d))))
        vals = spline(np.clip(s, 0.0, HALF_PI).ravel()).reshape(s.shape)
        kern = np.where(d > 0, kern, 0.0)
        integrand = kern * (vals - v0[:, None])
        total += np.sum(integrand * jac, axis=1)
    moment = np.where(flat == HALF_PI, 0.0, kernel_moment(flat))
    out = (total + v0 * moment) / np.pi
    out = np.where(flat == HALF_PI, 0.0, out)
    return float(out[0]) if sig.ndim == 0 else out.reshape(sig.shape)
