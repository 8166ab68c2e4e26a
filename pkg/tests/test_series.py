import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from sinkflow.errors import AliasingError, DomainError, SingularKernelError
from sinkflow.series import (HALF_PI, GridFunction, SineSeries, clausen2,
                             eval_series, eval_series_derivative,
                             h_apply_direct, h_apply_spectral, kernel_closed,
                             kernel_moment, kernel_series, make_grid,
                             project_to_sine, spectral_basis)

angles = st.floats(min_value=1e-3, max_value=HALF_PI - 1e-3)
coeff_lists = st.lists(st.floats(min_value=-2.0, max_value=2.0), min_size=1, max_size=24)


# --- grid -------------------------------------------------------------------

def test_grid_endpoints_and_weights():
    g = make_grid(2048, 1e-4)
    assert g.nodes[0] == 1e-4
    assert g.nodes[-1] == HALF_PI
    assert np.all(np.diff(g.nodes) > 0)
    assert g.weights.sum() == pytest.approx(HALF_PI, abs=1e-14)


def test_grid_is_cached_and_read_only():
    assert make_grid(512) is make_grid(512)
    with pytest.raises(ValueError):
        make_grid(512).nodes[0] = 0.0


def test_grid_cumulative_exact_for_linear():
    g = make_grid(1024)
    got = g.cumulative(np.ones(g.size))
    assert np.allclose(got, g.nodes, atol=1e-14)
    back = g.cumulative_from_end(np.ones(g.size))
    assert np.allclose(back, HALF_PI - g.nodes, atol=1e-13)


def test_grid_rejects_bad_arguments():
    with pytest.raises(ValueError):
        make_grid(4)
    with pytest.raises(ValueError):
        make_grid(256, sigma_min=0.0)


# --- sine series --------------------------------------------------------------

def test_sine_series_vanishes_at_both_ends():
    w = SineSeries(np.arange(1.0, 9.0))
    assert eval_series(w, 0.0) == 0.0
    assert eval_series(w, HALF_PI) == 0.0


def test_eval_series_domain():
    with pytest.raises(DomainError):
        eval_series(SineSeries.mode(1), 2.0)


@given(coeff_lists)
@settings(max_examples=50, deadline=None)
def test_parseval_matches_quadrature(coeffs):
    w = SineSeries(coeffs)
    q, _ = integrate.quad(lambda s: eval_series(w, s) ** 2, 0, HALF_PI, limit=400)
    assert w.norm() == pytest.approx(math.sqrt(q), rel=1e-8, abs=1e-12)


@given(coeff_lists)
@settings(max_examples=50, deadline=None)
def test_projection_reproduces_band_limited_input(coeffs):
    g = make_grid(512)
    w = SineSeries(coeffs)
    f = GridFunction(g, eval_series(w, g.nodes))
    got = project_to_sine(f, 64).coeffs
    expected = np.zeros(64)
    expected[: len(coeffs)] = coeffs
    assert np.allclose(got, expected, atol=1e-11)


def test_projection_aliasing_guard():
    g = make_grid(128)
    spectral_basis(g, 64)
    with pytest.raises(AliasingError):
        spectral_basis(g, 65)


def test_series_derivative_matches_finite_difference():
    w = SineSeries([0.3, -1.0, 0.25])
    s, h = 0.7, 1e-6
    fd = (eval_series(w, s + h) - eval_series(w, s - h)) / (2 * h)
    assert eval_series_derivative(w, s) == pytest.approx(fd, rel=1e-8)


@given(st.integers(min_value=1, max_value=40))
def test_h_eigenvalue(k):
    out = h_apply_spectral(SineSeries.mode(k))
    assert out.coeffs[k - 1] == pytest.approx(1.0 / (2 * k))
    assert out.norm() / SineSeries.mode(k).norm() == pytest.approx(1.0 / (2 * k))


# --- kernel -------------------------------------------------------------------

def test_kernel_known_value():
    # K(pi/4, pi/8) = log cot(pi/8) = log(1 + sqrt 2)
    assert kernel_closed(np.pi / 4, np.pi / 8) == pytest.approx(math.log1p(math.sqrt(2)),
                                                               rel=1e-14)


def test_kernel_vanishes_on_edges():
    assert kernel_closed(0.0, 0.4) == 0.0
    assert kernel_closed(HALF_PI, 0.4) == 0.0
    assert kernel_closed(0.4, 0.0) == 0.0


def test_kernel_diagonal_raises():
    with pytest.raises(SingularKernelError):
        kernel_closed(0.3, 0.3)


@given(angles, angles)
def test_kernel_symmetric_and_nonnegative(s, t):
    if abs(s - t) < 1e-6:
        return
    k1, k2 = kernel_closed(s, t), kernel_closed(t, s)
    assert k1 >= 0.0
    assert k1 == pytest.approx(k2, rel=1e-12, abs=1e-14)


@given(angles, angles)
@settings(max_examples=40)
def test_kernel_tan_and_sin_forms_agree(s, t):
    if abs(s - t) < 1e-4:
        return
    sin_form = math.log(abs(math.sin(s + t) / math.sin(s - t)))
    assert kernel_closed(s, t) == pytest.approx(sin_form, rel=1e-9, abs=1e-12)


def test_kernel_series_converges():
    s, t = np.array([0.3, 1.1]), np.array([0.9, 0.2])
    e2 = np.abs(kernel_series(s, t, 100) - kernel_closed(s, t)).max()
    e4 = np.abs(kernel_series(s, t, 10_000) - kernel_closed(s, t)).max()
    assert e4 < e2
    assert e4 < 1e-3


def test_clausen_special_values():
    # Cl2(pi/2) is Catalan's constant; Cl2(pi) = 0
    assert clausen2(HALF_PI) == pytest.approx(0.915965594177219, rel=1e-13)
    assert clausen2(np.pi) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("sigma", [0.05, 0.4, 1.0, 1.5])
def test_kernel_moment_against_quad(sigma):
    q1, _ = integrate.quad(lambda s: kernel_closed(s, sigma), 0, sigma, limit=200)
    q2, _ = integrate.quad(lambda s: kernel_closed(s, sigma), sigma, HALF_PI, limit=200)
    assert kernel_moment(sigma) == pytest.approx(q1 + q2, rel=1e-9)


def test_direct_and_spectral_h_agree():
    rng = np.random.default_rng(3)
    c = rng.uniform(-1, 1, 8) / np.arange(1, 9)
    g = make_grid(1024)
    w = GridFunction(g, eval_series(SineSeries(c), g.nodes))
    sigma = np.linspace(0.01, 1.56, 25)
    direct = h_apply_direct(w, sigma)
    spectral = eval_series(h_apply_spectral(SineSeries(c)), sigma)
    assert np.allclose(direct, spectral, atol=1e-9)


def test_direct_h_on_mode_one():
    g = make_grid(1024)
    w = GridFunction(g, np.sin(2 * g.nodes))
    sigma = np.array([0.2, 0.8, 1.3])
    assert np.allclose(h_apply_direct(w, sigma), 0.5 * np.sin(2 * sigma), atol=1e-9)


def test_direct_h_domain():
    g = make_grid(256)
    with pytest.raises(DomainError):
        h_apply_direct(GridFunction(g, np.zeros(g.size)), np.array([2.0]))
