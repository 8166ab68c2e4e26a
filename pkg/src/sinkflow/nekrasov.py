"""The nonlinear operator whose fixed point gives the free surface.

For a nonnegative ``zeta`` on ``(0, pi/2]``::

    Phi(zeta)(sigma) = 3/(alpha pi) * sin(sigma + (H zeta)(sigma)/3) * cot(sigma)
                       / exp(int_0^sigma zeta)

``Phi_k`` replaces ``cot`` by ``q_k``, which is capped at ``cot(1/k)`` on
``(0, 1/k]``.  ``H`` is applied spectrally (see :mod:`sinkflow.series`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .series import (HALF_PI, GridFunction, eval_series, h_apply_spectral,
                     project_to_sine, spectral_basis)

DEFAULT_MODES = 256

#: smallest alpha for which a nonnegative solution is known to exist
EXISTENCE_ALPHA = 2.0 / math.pi * (1.0 + 1.0 / (3.0 * math.sqrt(math.pi)))
#: above this alpha the operator is a contraction and the solution is unique
UNIQUENESS_ALPHA = 8.0 / math.pi
#: above this alpha the inclination stays below pi/2 and the cusp results hold
CUSP_ALPHA = 5.0 / math.sqrt(8.0)
#: radius of the invariant ball of nonnegative functions
BALL_RADIUS = 4.5 * math.sqrt(math.pi)


@dataclass(frozen=True)
class FlowParams:
    """Reduced Froude number ``alpha = Fr**2 / 2`` and derived regime flags."""

    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError("alpha must be a positive finite number")
        object.__setattr__(self, "alpha", float(self.alpha))

    @classmethod
    def from_froude(cls, froude: float) -> "FlowParams":
        return cls(0.5 * froude * froude)

    @property
    def froude(self) -> float:
        return math.sqrt(2.0 * self.alpha)

    @property
    def existence_guaranteed(self) -> bool:
        return self.alpha >= EXISTENCE_ALPHA

    @property
    def uniqueness_guaranteed(self) -> bool:
        return self.alpha > UNIQUENESS_ALPHA

    @property
    def cusp_regime(self) -> bool:
        return self.alpha > CUSP_ALPHA

    @property
    def lipschitz_bound(self) -> float:
        """Proven Lipschitz constant ``8/(alpha pi)`` of ``Phi`` on the cone."""
        return 8.0 / (self.alpha * math.pi)

    @property
    def invariant_radius(self) -> float:
        """Smallest radius ``3/(alpha pi - 2)`` of a ball mapped into itself
        (``inf`` when ``alpha pi <= 2``)."""
        d = self.alpha * math.pi - 2.0
        return 3.0 / d if d > 0 else math.inf


def q_k(sigma, k: int | None):
    """``cot(sigma)``, capped at ``cot(1/k)`` on ``(0, 1/k]``; exactly 0 at
    ``pi/2``.  ``k=None`` gives the uncapped ``cot``."""
    sigma = np.asarray(sigma, dtype=float)
    out = np.cos(sigma) / np.sin(sigma)
    out = np.where(sigma == HALF_PI, 0.0, out)
    if k is not None:
        if k < 1:
            raise ValueError("regularization index must be a positive integer")
        out = np.where(sigma <= 1.0 / k, 1.0 / math.tan(1.0 / k), out)
    return out


def phi_values(values: np.ndarray, grid, alpha: float, modes: int,
               k: int | None = None) -> np.ndarray:
    """Array-level ``Phi`` / ``Phi_k`` used inside the Picard loop.

    No precondition check: callers keep ``values`` nonnegative.
    """
    S, P = spectral_basis(grid, modes)
    wavenumbers = np.arange(1, modes + 1)
    h = S @ ((P @ values) / (2.0 * wavenumbers))
    sigma = grid.nodes
    return (3.0 / (alpha * math.pi) * np.sin(sigma + h / 3.0) * q_k(sigma, k)
            * np.exp(-grid.cumulative(values)))


def _require_nonnegative(zeta: GridFunction):
    if np.any(zeta.values < 0.0):
        raise PreconditionError(
            "Phi is defined on nonnegative functions; clamp the argument first")


def phi_apply(zeta: GridFunction, params: FlowParams,
              modes: int = DEFAULT_MODES) -> GridFunction:
    """Evaluate ``Phi(zeta)`` at every grid node.

    Raises
    ------
    PreconditionError
        If any value of ``zeta`` is negative.
    """
    _require_nonnegative(zeta)
    return GridFunction(zeta.grid, phi_values(zeta.values, zeta.grid,
                                              params.alpha, modes, None))


def phi_k_apply(zeta: GridFunction, params: FlowParams, k: int,
                modes: int = DEFAULT_MODES) -> GridFunction:
    """Evaluate the regularized operator ``Phi_k(zeta)`` (``cot`` replaced by
    :func:`q_k`)."""
    _require_nonnegative(zeta)
    return GridFunction(zeta.grid, phi_values(zeta.values, zeta.grid,
                                              params.alpha, modes, int(k)))


def cumulative_integral(zeta: GridFunction) -> GridFunction:
    """``int_0^sigma zeta`` at every node (trapezoid rule, rectangle on the
    first interval)."""
    return GridFunction(zeta.grid, zeta.grid.cumulative(zeta.values))


def h_on_grid(zeta: GridFunction, modes: int = DEFAULT_MODES) -> GridFunction:
    """``H zeta`` at the nodes via projection, diagonal scaling, synthesis."""
    series = h_apply_spectral(project_to_sine(zeta, modes))
    return GridFunction(zeta.grid, eval_series(series, zeta.grid.nodes))


def eta(zeta: GridFunction, modes: int = DEFAULT_MODES) -> GridFunction:
    """Inclination angle ``sigma + (H zeta)(sigma)/3`` of the free surface."""
    h = h_on_grid(zeta, modes)
    return GridFunction(zeta.grid, zeta.grid.nodes + h.values / 3.0)
