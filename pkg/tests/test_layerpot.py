"""Single layer potential quadrature and the Neumann-Poincare operator."""

import math

import numpy as np
import pytest

from neutral_lab.errors import NearEvaluationError, ValidationError
from neutral_lab.geometry import discretize, make_ellipse
from neutral_lab.layerpot import (
    feature_size,
    kstar_matrix,
    min_target_distance,
    normal_derivative_coupling,
    resample_periodic,
    single_layer_grad_off,
    single_layer_off,
    single_layer_on_boundary,
)

RADIUS = 1.7


@pytest.fixture(scope="module")
def circle():
    return discretize(make_ellipse(0.0, RADIUS, RADIUS), 256)


def probe_ring(radius, m=64):
    t = 2 * math.pi * np.arange(m) / m
    return t, radius * np.column_stack([np.cos(t), np.sin(t)])


def test_circle_diagonalization_on_boundary(circle):
    # S[e^{ik theta}] = -(R / 2|k|) e^{ik theta} on the circle itself
    for k in range(1, 9):
        for dens in (np.cos(k * circle.t), np.sin(k * circle.t)):
            vals = single_layer_on_boundary(circle, dens)
            assert np.max(np.abs(vals + (RADIUS / (2 * k)) * dens)) < 1e-12
    # k = 0: S[1] = R ln R
    vals = single_layer_on_boundary(circle, np.ones(circle.n))
    assert np.max(np.abs(vals - RADIUS * math.log(RADIUS))) < 1e-12


@pytest.mark.parametrize("r,regime", [(2.5, "exterior"), (0.6, "interior")])
def test_circle_diagonalization_off_boundary(circle, r, regime):
    # the mode picks up (R/r)^|k| outside and (r/R)^|k| inside
    t, pts = probe_ring(r)
    for k in range(1, 9):
        ratio = (RADIUS / r) ** k if regime == "exterior" else (r / RADIUS) ** k
        for mode, dens in ((np.cos, np.cos(k * circle.t)), (np.sin, np.sin(k * circle.t))):
            vals = single_layer_off(circle, dens, pts)
            ref = -(RADIUS / (2 * k)) * ratio * mode(k * t)
            assert np.max(np.abs(vals - ref)) < 1e-12


def test_uniform_charge_potential_and_gradient(circle):
    ones = np.ones(circle.n)
    _, ext = probe_ring(2.5)
    assert np.max(np.abs(single_layer_off(circle, ones, ext) - RADIUS * math.log(2.5))) < 1e-13
    _, inn = probe_ring(0.6)
    # constant inside: the circle's own potential level R ln R
    assert np.max(np.abs(single_layer_off(circle, ones, inn) - RADIUS * math.log(RADIUS))) < 1e-13
    grad = single_layer_grad_off(circle, ones, np.array([[3.0, 0.0]]))
    assert grad[0] == pytest.approx([RADIUS / 3.0, 0.0], abs=1e-13)


def test_kstar_circle_entries(circle):
    # on a circle the kernel is the constant 1/(4 pi R); weights folded in
    k = kstar_matrix(circle)
    expected = np.tile(circle.weights / (4 * math.pi * RADIUS), (circle.n, 1))
    assert np.max(np.abs(k - expected)) < 1e-14


def test_kstar_annihilates_oscillatory_modes_on_circle(circle):
    # constant-kernel operator integrates mean-free densities to zero, so
    # the normal-derivative limits reduce to +-(1/2) density
    k = kstar_matrix(circle)
    for freq in (1, 3, 8):
        dens = np.cos(freq * circle.t)
        assert np.max(np.abs(k @ dens)) < 1e-12
        assert np.max(np.abs((0.5 * dens + k @ dens) - 0.5 * dens)) < 1e-12


def test_weights_are_left_eigenvector_of_kstar():
    # interior Gauss identity: integrating the jump kernel over the curve
    # gives exactly 1/2; discretely, w^T K = (1/2) w^T to machine precision
    for curve in (make_ellipse(0.0, 1.3, 0.8), make_ellipse(0.0, 2.0, 0.7)):
        d = discretize(curve, 128)
        k = kstar_matrix(d)
        assert np.max(np.abs(d.weights @ k - 0.5 * d.weights)) < 1e-14


def test_jump_relation_generic_curve():
    # one-sided Richardson limits of d/dnu S at x +- eps nu reproduce
    # (+-1/2 I + K*) rho; accuracy is limited by the O(eps^3) remainder
    d = discretize(make_ellipse(0.0, 1.3, 0.8), 2048)
    rho = np.cos(2 * d.t) + 0.3 * np.sin(3 * d.t)
    k = kstar_matrix(d)

    def flux(eps):
        pts = d.nodes + eps * d.normals
        grad = single_layer_grad_off(d, rho, pts, min_distance=0.0)
        return np.sum(grad * d.normals, axis=1)

    def richardson(sign, eps=0.1):
        f1, f2, f4 = flux(sign * eps), flux(sign * eps / 2), flux(sign * eps / 4)
        return (4 * (2 * f4 - f2) - (2 * f2 - f1)) / 3

    ext, inn = richardson(+1.0), richardson(-1.0)
    assert np.max(np.abs(ext - (0.5 * rho + k @ rho))) < 1e-2
    assert np.max(np.abs(inn - (-0.5 * rho + k @ rho))) < 1e-3
    assert np.max(np.abs((ext - inn) - rho)) < 1e-2


def test_spectral_convergence_on_boundary():
    curve = make_ellipse(0.0, 1.5, 0.6)
    ref = discretize(curve, 1024)
    vref = single_layer_on_boundary(ref, np.exp(2 * np.cos(ref.t)))

    def err(n):
        d = discretize(curve, n)
        vals = single_layer_on_boundary(d, np.exp(2 * np.cos(d.t)))
        return np.max(np.abs(vals - vref[:: 1024 // n]))

    e64, e128 = err(64), err(128)
    assert e64 / max(e128, 1e-16) >= 10.0
    assert e128 < 1e-12


def test_near_zone_refused(circle):
    target = np.array([[RADIUS + 0.01, 0.0]])
    with pytest.raises(NearEvaluationError) as info:
        single_layer_off(circle, np.ones(circle.n), target)
    assert info.value.distance == pytest.approx(0.01, abs=1e-6)
    assert info.value.distance < info.value.limit
    # explicit min_distance opt-out evaluates anyway
    vals = single_layer_off(circle, np.ones(circle.n), target, min_distance=0.0)
    assert np.isfinite(vals).all()


def test_density_shape_checked(circle):
    with pytest.raises(ValidationError):
        single_layer_off(circle, np.ones(circle.n - 1), np.array([[3.0, 0.0]]))
    with pytest.raises(ValidationError):
        single_layer_off(circle, np.ones(circle.n), np.zeros((2, 3)))


def test_coupling_between_disjoint_circles():
    # d/dnu S_{R1}[1] on the radius-R2 circle is exactly R1/R2
    d1 = discretize(make_ellipse(0.0, 1.0, 1.0), 64)
    d2 = discretize(make_ellipse(0.0, 2.0, 2.0), 64)
    vals = normal_derivative_coupling(d1, d2) @ np.ones(64)
    assert np.max(np.abs(vals - 0.5)) < 1e-13
    with pytest.raises(ValidationError):
        normal_derivative_coupling(d1, d1)


def test_resample_periodic_band_limited():
    t64 = 2 * math.pi * np.arange(64) / 64
    t256 = 2 * math.pi * np.arange(256) / 256
    data = np.cos(3 * t64) - 0.5 * np.sin(7 * t64)
    up = resample_periodic(data, 256)
    assert np.max(np.abs(up - (np.cos(3 * t256) - 0.5 * np.sin(7 * t256)))) < 1e-13
    same = resample_periodic(data, 64)
    assert same is not data
    assert np.array_equal(same, data)
    with pytest.raises(ValidationError):
        resample_periodic(up, 64)  # refinement helper never coarsens


def test_feature_size_and_target_distance(circle):
    assert feature_size(circle) == pytest.approx(RADIUS, abs=1e-12)
    ell = discretize(make_ellipse(0.0, 2.0, 1.0), 128)
    assert feature_size(ell) == pytest.approx(1.0 / 2.0, rel=1e-6)
    assert min_target_distance(circle, np.array([[RADIUS + 0.25, 0.0]])) == pytest.approx(
        0.25, abs=1e-4
    )
