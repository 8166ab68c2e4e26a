import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sinkflow.errors import PreconditionError
from sinkflow.nekrasov import (BALL_RADIUS, CUSP_ALPHA, EXISTENCE_ALPHA,
                               UNIQUENESS_ALPHA, FlowParams, cumulative_integral,
                               eta, h_on_grid, phi_apply, phi_k_apply, q_k)
from sinkflow.series import HALF_PI, GridFunction, make_grid

GRID = make_grid(1024)


def cone_sample(seed, norm):
    """Nonnegative grid function with a given L2 norm."""
    rng = np.random.default_rng(seed)
    k = np.arange(1, 17)
    c = rng.uniform(-1, 1, k.size) / k
    v = np.abs(np.sin(2 * np.outer(GRID.nodes, k)) @ c) + 0.1 * np.cos(GRID.nodes)
    return GridFunction(GRID, v * norm / GRID.norm(v))


def test_flow_params_froude_round_trip():
    p = FlowParams.from_froude(2.0)
    assert p.alpha == 2.0
    assert p.froude == pytest.approx(2.0)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_flow_params_rejects(bad):
    with pytest.raises(ValueError):
        FlowParams(bad)


def test_regime_flags():
    assert not FlowParams(0.5).existence_guaranteed
    p = FlowParams(2.0)
    assert p.existence_guaranteed and p.cusp_regime and not p.uniqueness_guaranteed
    assert FlowParams(3.0).uniqueness_guaranteed
    assert not FlowParams(1.5).cusp_regime


def test_threshold_constants():
    assert EXISTENCE_ALPHA == pytest.approx(2 / math.pi * (1 + 1 / (3 * math.sqrt(math.pi))))
    assert UNIQUENESS_ALPHA == pytest.approx(8 / math.pi)
    assert CUSP_ALPHA == pytest.approx(5 / math.sqrt(8))
    assert BALL_RADIUS == pytest.approx(9 * math.sqrt(math.pi) / 2)


def test_invariant_radius_within_ball_at_threshold():
    # at the existence threshold the two radius conditions meet
    assert FlowParams(EXISTENCE_ALPHA).invariant_radius == pytest.approx(BALL_RADIUS)
    assert FlowParams(0.5).invariant_radius == math.inf


def test_q_k_caps_and_endpoint():
    s = np.array([1e-3, 0.05, 0.1, 1.0, HALF_PI])
    q = q_k(s, 10)
    assert q[0] == q[1] == q[2] == pytest.approx(1 / math.tan(0.1))
    assert q[3] == pytest.approx(1 / math.tan(1.0))
    assert q[4] == 0.0
    assert np.all(q <= q_k(s, None) + 1e-15)


def test_q_k_rejects_zero_index():
    with pytest.raises(ValueError):
        q_k(0.5, 0)


def test_phi_of_zero_is_scaled_cosine():
    z = GridFunction(GRID, np.zeros(GRID.size))
    out = phi_apply(z, FlowParams(3.0))
    assert np.allclose(out.values, np.cos(GRID.nodes) / math.pi, atol=1e-15)
    assert out.values[-1] == 0.0


def test_phi_precondition():
    v = np.zeros(GRID.size)
    v[10] = -1e-3
    with pytest.raises(PreconditionError):
        phi_apply(GridFunction(GRID, v), FlowParams(3.0))


@given(st.floats(min_value=0.8, max_value=50.0), st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_phi_scales_inversely_with_alpha(alpha, seed):
    z = cone_sample(seed, 1.0)
    a = phi_apply(z, FlowParams(alpha)).values
    b = phi_apply(z, FlowParams(2 * alpha)).values
    assert np.allclose(a, 2 * b, rtol=1e-13, atol=1e-15)


@given(st.integers(0, 10_000), st.floats(min_value=0.0, max_value=BALL_RADIUS),
       st.sampled_from([1, 4, 32, None]))
@settings(max_examples=40, deadline=None)
def test_phi_k_keeps_ball_nonnegative(seed, norm, k):
    # inside the invariant ball the inclination stays in [0, pi], so Phi_k >= 0
    z = cone_sample(seed, norm)
    p = FlowParams(3.0)
    out = phi_apply(z, p) if k is None else phi_k_apply(z, p, k)
    assert out.values.min() >= -1e-12


@given(st.integers(0, 10_000), st.sampled_from([2, 8, 64]))
@settings(max_examples=25, deadline=None)
def test_phi_k_below_phi(seed, k):
    z = cone_sample(seed, 1.0)
    p = FlowParams(3.0)
    assert np.all(phi_k_apply(z, p, k).values <= phi_apply(z, p).values + 1e-14)


@given(st.integers(0, 10_000), st.integers(0, 10_000), st.floats(2.6, 20.0))
@settings(max_examples=30, deadline=None)
def test_phi_lipschitz_on_cone(s1, s2, alpha):
    p = FlowParams(alpha)
    w1, w2 = cone_sample(s1, 2.0), cone_sample(s2, 0.5)
    num = (phi_apply(w2, p) - phi_apply(w1, p)).norm()
    den = (w2 - w1).norm()
    assert num <= p.lipschitz_bound * den + 1e-12


def test_cumulative_integral_of_cosine():
    z = GridFunction(GRID, np.cos(GRID.nodes))
    got = cumulative_integral(z).values
    assert np.allclose(got, np.sin(GRID.nodes), atol=2e-6)


def test_h_on_grid_and_eta_for_mode():
    z = GridFunction(GRID, np.sin(4 * GRID.nodes))
    assert np.allclose(h_on_grid(z, 64).values, np.sin(4 * GRID.nodes) / 4, atol=1e-12)
    e = eta(z, 64)
    assert e.values[-1] == HALF_PI
    assert np.allclose(e.values, GRID.nodes + np.sin(4 * GRID.nodes) / 12, atol=1e-12)
