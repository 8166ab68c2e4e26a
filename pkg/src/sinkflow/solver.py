"""Picard iteration for ``zeta = Phi(zeta)`` with a ``Phi_k`` continuation."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConvergenceError, DivergenceError, RegimeWarning
from .nekrasov import (DEFAULT_MODES, EXISTENCE_ALPHA, UNIQUENESS_ALPHA,
                       FlowParams, phi_values)
from .series import GridFunction, make_grid

# residuals below this are rounding noise and are left out of ratio estimates
_RATIO_FLOOR = 1e-13


@dataclass(frozen=True)
class SolverConfig:
    """Discretization and stopping settings.

    ``reg_schedule`` lists the regularization indices ``k`` walked in order;
    its last entry must be ``math.inf`` (the unregularized operator).
    """

    tol: float = 1e-10
    max_iter: int = 500
    modes: int = DEFAULT_MODES
    nodes: int = 2048
    reg_schedule: tuple = (16, 64, 256, 1024, math.inf)
    sigma_min: float = 1e-4

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.modes < 1:
            raise ValueError("modes must be positive")
        sched = tuple(self.reg_schedule)
        if not sched or sched[-1] != math.inf:
            raise ValueError("reg_schedule must end with inf")
        if any(b <= a for a, b in zip(sched, sched[1:])):
            raise ValueError("reg_schedule must be strictly increasing")
        if any(k != math.inf and (k < 1 or int(k) != k) for k in sched):
            raise ValueError("regularization indices must be positive integers")
        object.__setattr__(self, "reg_schedule",
                           tuple(k if k == math.inf else int(k) for k in sched))

    def grid(self):
        return make_grid(self.nodes, self.sigma_min)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["reg_schedule"] = ["inf" if k == math.inf else k for k in self.reg_schedule]
        return d


@dataclass
class SolveReport:
    """What happened during one solve."""

    alpha: float
    stages: list = field(default_factory=list)
    iterations_per_stage: list = field(default_factory=list)
    stage_converged: list = field(default_factory=list)
    residual_history: list = field(default_factory=list)
    contraction_estimate: float = math.nan
    converged: bool = False
    final_residual: float = math.nan
    clamped_nodes: int = 0
    certified: bool = False
    regime: str = ""
    warm_started: bool = False
    error: str | None = None

    @property
    def final_stage_residuals(self) -> list:
        n = self.iterations_per_stage[-1] if self.iterations_per_stage else 0
        return self.residual_history[len(self.residual_history) - n:]

    @property
    def total_iterations(self) -> int:
        return int(sum(self.iterations_per_stage))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stages"] = ["inf" if k == math.inf else k for k in self.stages]
        return d


def regime_message(params: FlowParams) -> str:
    a = params.alpha
    if a < EXISTENCE_ALPHA:
        return (f"alpha={a:g} is below the existence threshold {EXISTENCE_ALPHA:.4f}; "
                "no solution is guaranteed")
    if a <= UNIQUENESS_ALPHA:
        return ("existence-only regime; convergence and uniqueness not guaranteed "
                f"(alpha={a:g} <= 8/pi)")
    return "contraction regime; solution unique"


def _ratio_estimate(residuals) -> float:
    r = np.asarray(residuals, dtype=float)
    if r.size < 2:
        return math.nan
    prev, nxt = r[:-1], r[1:]
    keep = prev > _RATIO_FLOOR
    return float(np.max(nxt[keep] / prev[keep])) if np.any(keep) else math.nan


def solve(params: FlowParams, config: SolverConfig | None = None,
          initial: GridFunction | np.ndarray | None = None):
    """Solve ``zeta = Phi(zeta)`` by Picard iteration.

    Each stage iterates ``zeta <- max(Phi_k(zeta), 0)`` until the L2 residual
    ``||zeta - Phi_k(zeta)||`` drops below ``config.tol`` and hands its fixed
    point to the next stage.  Without ``initial`` the stages follow
    ``config.reg_schedule`` starting from ``Phi_k(0)``; with ``initial`` (a warm
    start) only the final, unregularized stage runs.

    Returns
    -------
    zeta : GridFunction
        Nonnegative fixed point.
    report : SolveReport

    Raises
    ------
    DivergenceError
        An iterate became non-finite.
    ConvergenceError
        The unregularized stage hit ``max_iter``; ``.report`` and ``.zeta``
        hold the partial result.
    """
    config = config or SolverConfig()
    grid = config.grid()
    alpha = params.alpha
    report = SolveReport(alpha=alpha, regime=regime_message(params))
    if not params.uniqueness_guaranteed:
        warnings.warn(report.regime, RegimeWarning, stacklevel=2)

    if initial is None:
        schedule = config.reg_schedule
        first_k = None if schedule[0] == math.inf else schedule[0]
        z = phi_values(np.zeros(grid.size), grid, alpha, config.modes, first_k)
    else:
        schedule = (math.inf,)
        z = np.asarray(getattr(initial, "values", initial), dtype=float)
        if z.shape != grid.nodes.shape:
            raise ValueError("initial iterate does not match the configured grid")
        report.warm_started = True
    z = np.maximum(z, 0.0)

    for k in schedule:
        kk = None if k == math.inf else int(k)
        stage_res = []
        converged = False
        for _ in range(config.max_iter):
            p = phi_values(z, grid, alpha, config.modes, kk)
            if not np.all(np.isfinite(p)):
                report.stages.append(k)
                report.iterations_per_stage.append(len(stage_res))
                report.stage_converged.append(False)
                report.error = "non-finite iterate"
                raise DivergenceError(f"iteration diverged at alpha={alpha:g}",
                                      report=report, zeta=None)
            r = grid.norm(z - p)
            stage_res.append(r)
            report.residual_history.append(r)
            if r <= config.tol:
                converged = True
                break
            z = np.maximum(p, 0.0)
        report.stages.append(k)
        report.iterations_per_stage.append(len(stage_res))
        report.stage_converged.append(converged)

    phi_z = phi_values(z, grid, alpha, config.modes, None)
    report.final_residual = grid.norm(z - phi_z)
    report.clamped_nodes = int(np.count_nonzero(phi_z < 0.0))
    report.converged = bool(report.stage_converged[-1]
                            and report.final_residual <= config.tol)
    report.contraction_estimate = _ratio_estimate(report.final_stage_residuals)
    report.certified = report.converged and params.uniqueness_guaranteed
    zeta = GridFunction(grid, z)
    if not report.converged:
        report.error = f"no convergence within {config.max_iter} iterations"
        raise ConvergenceError(report.error, report=report, zeta=zeta)
    return zeta, report


def residual(zeta: GridFunction, params: FlowParams,
             modes: int = DEFAULT_MODES) -> float:
    """``||zeta - Phi(zeta)||`` in the grid L2 norm."""
    phi = phi_values(zeta.values, zeta.grid, params.alpha, modes, None)
    return zeta.grid.norm(zeta.values - phi)


def _as_params(a) -> FlowParams:
    return a if isinstance(a, FlowParams) else FlowParams(float(a))


def _solve_quiet(params, config, initial):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        try:
            return solve(params, config, initial)
        except ConvergenceError as exc:
            report = exc.report or SolveReport(alpha=params.alpha, error=str(exc))
            report.error = str(exc)
            return None, report


def sweep(alphas, config: SolverConfig | None = None, *, jobs: int = 1,
          warm_start: bool = True):
    """Solve for several Froude numbers.

    With ``jobs == 1`` and ``warm_start`` each solve starts from the previous
    converged solution (pass ``alphas`` in ascending order).  With
    ``jobs > 1`` the solves run cold, in parallel threads.  Failures do not
    stop the sweep: the entry is ``(None, report)`` with ``report.error`` set.

    Returns
    -------
    list of (GridFunction or None, SolveReport), in input order.
    """
    config = config or SolverConfig()
    params = [_as_params(a) for a in alphas]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda p: _solve_quiet(p, config, None), params))
    results = []
    previous = None
    for p in params:
        zeta, report = _solve_quiet(p, config, previous if warm_start else None)
        if zeta is None and previous is not None:
            zeta, report = _solve_quiet(p, config, None)
        results.append((zeta, report))
        if zeta is not None:
            previous = zeta
    return results
