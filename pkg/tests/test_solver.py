import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sinkflow.errors import ConvergenceError, RegimeWarning
from sinkflow.nekrasov import FlowParams
from sinkflow.series import GridFunction, h_apply_direct, make_grid
from sinkflow.solver import SolverConfig, residual, solve, sweep

from conftest import solved

# ||zeta*|| at alpha=3; the 2048- and 4096-node solutions agree to 5e-8
ZETA_NORM_ALPHA3 = 0.2787057


def direct_picard(alpha, nodes=384, iters=40):
    """Independent oracle: plain Picard with H applied by singular quadrature."""
    g = make_grid(nodes)
    s = g.nodes
    cot = np.cos(s) / np.sin(s)
    cot[-1] = 0.0
    v = np.zeros(g.size)
    for _ in range(iters):
        h = h_apply_direct(GridFunction(g, v), s)
        v = np.maximum(3 / (alpha * math.pi) * np.sin(s + h / 3) * cot
                       * np.exp(-g.cumulative(v)), 0.0)
    return g.norm(v)


def test_solution_norm_frozen(alpha3):
    _, _, zeta, report, _ = alpha3
    assert zeta.norm() == pytest.approx(ZETA_NORM_ALPHA3, rel=1e-6)
    assert report.converged and report.certified


def test_solution_matches_direct_quadrature_oracle(alpha3):
    _, _, zeta, _, _ = alpha3
    assert direct_picard(3.0) == pytest.approx(zeta.norm(), rel=1e-3)


def test_solution_is_fixed_point_and_nonnegative(alpha3):
    params, config, zeta, report, _ = alpha3
    assert zeta.values.min() >= 0.0
    assert residual(zeta, params, config.modes) <= config.tol
    assert report.final_residual <= config.tol
    assert report.clamped_nodes == 0


def test_report_stage_bookkeeping(alpha3):
    _, config, _, report, _ = alpha3
    assert report.stages == list(config.reg_schedule)
    assert len(report.residual_history) == report.total_iterations
    assert all(report.stage_converged)
    assert report.contraction_estimate < FlowParams(3.0).lipschitz_bound


def test_mesh_refinement_converges(alpha3):
    _, _, zeta, _, _ = alpha3
    fine = solved(3.0, 4096)[2]
    coarse = np.interp(fine.grid.nodes, zeta.grid.nodes, zeta.values)
    assert fine.grid.norm(coarse - fine.values) < 1e-6


@pytest.mark.parametrize("alpha", [50.0, 100.0])
def test_large_alpha_first_order(alpha):
    # zeta = 3 cos(sigma)/(alpha pi) + O(alpha^-2); the scaled remainder
    # settles near 0.4086
    zeta = solved(alpha)[2]
    lead = 3 * np.cos(zeta.grid.nodes) / (alpha * math.pi)
    assert 0.40 < zeta.grid.norm(zeta.values - lead) * alpha**2 < 0.42


def test_warm_start_skips_ladder(alpha3):
    params, config, zeta, _, _ = alpha3
    z2, report = solve(params, config, initial=zeta)
    assert report.warm_started and report.stages == [math.inf]
    assert report.total_iterations <= 2
    assert zeta.grid.norm(z2.values - zeta.values) <= 10 * config.tol


def test_warm_start_shape_mismatch(alpha3):
    params, config, _, _, _ = alpha3
    with pytest.raises(ValueError):
        solve(params, config, initial=np.zeros(10))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=5, deadline=None)
def test_uniqueness_from_random_starts(seed):
    params, config, zeta, _, _ = solved(3.0)
    rng = np.random.default_rng(seed)
    start = np.abs(zeta.values + rng.normal(0, 1.0, zeta.grid.size))
    z2, _ = solve(params, config, initial=start)
    assert zeta.grid.norm(z2.values - zeta.values) <= 10 * config.tol


def test_regime_warning_below_uniqueness():
    with pytest.warns(RegimeWarning):
        _, report = solve(FlowParams(2.0), SolverConfig(nodes=1024))
    assert report.converged and not report.certified


def test_convergence_error_carries_report():
    with pytest.raises(ConvergenceError) as info:
        solve(FlowParams(3.0), SolverConfig(max_iter=2))
    exc = info.value
    assert exc.report is not None and not exc.report.converged
    assert exc.zeta is not None
    assert exc.report.error


@pytest.mark.parametrize("kwargs", [
    {"tol": 0.0}, {"max_iter": 0}, {"modes": 0},
    {"reg_schedule": (16, 64)}, {"reg_schedule": (64, 16, math.inf)},
    {"reg_schedule": (0, math.inf)},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_config_to_dict_is_json_friendly():
    d = SolverConfig().to_dict()
    assert d["reg_schedule"][-1] == "inf"


def test_sweep_warm_and_parallel_agree():
    cfg = SolverConfig(nodes=1024)
    alphas = [3.0, 5.0, 10.0]
    warm = sweep(alphas, cfg)
    cold = sweep(alphas, cfg, jobs=3)
    for (zw, rw), (zc, rc), a in zip(warm, cold, alphas):
        assert rw.alpha == rc.alpha == a
        assert zw.grid.norm(zw.values - zc.values) <= 10 * cfg.tol
    assert warm[1][1].warm_started and not cold[1][1].warm_started


def test_sweep_records_failures():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        out = sweep([3.0, 5.0], SolverConfig(max_iter=1))
    assert all(z is None and r.error for z, r in out)
