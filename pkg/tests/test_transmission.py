"""Two-interface transmission solves and neutrality diagnostics."""

import math

import numpy as np
import pytest

from neutral_lab.errors import (
    UnsupportedConfigurationError,
    ValidationError,
)
from neutral_lab.geometry import CoatedInclusion, confocal_pair, discretize, make_ellipse
from neutral_lab.designer import confocal_design, reciprocal_dual
from neutral_lab.transmission import (
    ConductivityProfile,
    HarmonicPoly,
    contrasts,
    decay_exponent,
    eval_u,
    neutrality_report,
    principal_profile,
    solve_both_axes,
    solve_harmonic,
    solve_uniform,
)


def disks(r_in=1.0, r_out=math.sqrt(2.0)):
    return CoatedInclusion(
        make_ellipse(0.0, r_in, r_in), make_ellipse(0.0, r_out, r_out), None
    )


@pytest.fixture(scope="module")
def design_case():
    dr = confocal_design(1.0, 0.2, 1.5, 5.0, 1.0)
    inc = confocal_pair(1.0, 0.2, 1.5)
    return inc, dr, dr.profile(5.0, 1.0)


def test_contrast_parameters_exact():
    assert contrasts(ConductivityProfile.isotropic(0.0, 1.0, 2.0)).lam == -0.5
    assert contrasts(ConductivityProfile.isotropic(math.inf, 1.0, 2.0)).lam == 0.5
    cp = contrasts(ConductivityProfile(5.0, 1.0, (2.0, 4.0)))
    assert cp.lam == 0.75
    assert cp.mu == (-1.5, (1.0 + 4.0) / (2.0 * (1.0 - 4.0)))


def test_profile_validation():
    with pytest.raises(ValidationError):
        ConductivityProfile(-1.0, 1.0, (2.0, 2.0))
    with pytest.raises(ValidationError):
        ConductivityProfile(5.0, 0.0, (2.0, 2.0))
    with pytest.raises(ValidationError):
        ConductivityProfile(1.0, 1.0, (2.0, 2.0))  # core equals shell
    with pytest.raises(ValidationError):
        ConductivityProfile(5.0, 1.0, (1.0, 2.0))  # matrix equals shell
    with pytest.raises(ValidationError):
        ConductivityProfile(5.0, 1.0, (2.0,))
    with pytest.raises(ValidationError):
        ConductivityProfile(5.0, 1.0, (2.0, math.inf))
    assert ConductivityProfile.isotropic(5.0, 1.0, 2.0).is_isotropic


def test_disk_neutrality_machine_exact():
    # f = 1/2 disks with sigma = (5, 1, 2) are exactly neutral
    rep = neutrality_report(
        disks(), ConductivityProfile.isotropic(5.0, 1.0, 2.0), n=256, probe_radius=3.0
    )
    assert max(rep.residuals) < 1e-12
    for ax in rep.axes:
        assert abs(ax.first_moment[0]) < 1e-12 and abs(ax.first_moment[1]) < 1e-12
        assert ax.core_slope_measured == pytest.approx(0.5, abs=1e-12)
        assert ax.core_slope_predicted == pytest.approx(0.5, abs=1e-14)


def test_disk_perturbed_matrix_not_neutral():
    rep = neutrality_report(
        disks(), ConductivityProfile.isotropic(5.0, 1.0, 2.4), n=256, probe_radius=3.0
    )
    assert min(rep.residuals) > 1e-3


def test_field_values_match_background_when_neutral():
    inc = disks()
    p = ConductivityProfile.isotropic(5.0, 1.0, 2.0)
    pair = solve_uniform(inc, p, axis=1, n=256)
    pts = np.array([[3.0, 0.0], [0.0, 3.0], [-2.5, 1.5]])
    vals, grads = eval_u(inc, pair, p, pts)
    assert np.max(np.abs(vals - pts[:, 0])) < 1e-12
    assert np.max(np.abs(grads - [1.0, 0.0])) < 1e-12


def test_design_identities(design_case):
    inc, dr, p = design_case
    rep = neutrality_report(inc, p, n=256)
    assert max(rep.residuals) < 1e-12
    for ax in rep.axes:
        # interior field is exactly linear; slope given by the contrasts
        assert ax.core_gradient_deviation < 1e-12
        assert ax.core_slope_measured == pytest.approx(ax.core_slope_predicted, abs=1e-10)
        # density identities: inner from the flux jump, outer from neutrality
        assert ax.flux_identity_residual < 1e-10
        assert ax.coating_identity_residual < 1e-12
    # the two axis slopes are the frozen rationals 49/89 and 41/101
    assert rep.axes[0].core_slope_measured == pytest.approx(49.0 / 89.0, abs=1e-12)
    assert rep.axes[1].core_slope_measured == pytest.approx(41.0 / 101.0, abs=1e-12)


def test_extreme_core_contrasts(design_case):
    inc, _, _ = design_case
    for sigma_c in (0.0, math.inf):
        dr = confocal_design(1.0, 0.2, 1.5, sigma_c, 1.0)
        rep = neutrality_report(inc, dr.profile(sigma_c, 1.0), n=256)
        assert max(rep.residuals) < 1e-12


def test_solve_both_axes_matches_single_solves(design_case):
    inc, _, p = design_case
    pair1, pair2 = solve_both_axes(inc, p, n=128)
    ref1 = solve_uniform(inc, p, axis=1, n=128)
    ref2 = solve_uniform(inc, p, axis=2, n=128)
    assert np.array_equal(pair1.phi, ref1.phi) and np.array_equal(pair1.psi, ref1.psi)
    assert np.array_equal(pair2.phi, ref2.phi) and np.array_equal(pair2.psi, ref2.psi)


def test_density_grid_convergence(design_case):
    inc, _, p = design_case
    coarse = solve_uniform(inc, p, axis=1, n=128)
    fine = solve_uniform(inc, p, axis=1, n=256)
    assert np.max(np.abs(fine.phi[::2] - coarse.phi)) < 1e-12
    assert np.max(np.abs(fine.psi[::2] - coarse.psi)) < 1e-12


def test_reciprocal_profile_neutral_to_orthogonal_field(design_case):
    inc, _, p = design_case
    for axis_src, axis_dual in ((1, 2), (2, 1)):
        dual = reciprocal_dual(p, axis=axis_src)
        assert dual.sigma_c == pytest.approx(0.2)
        assert dual.sigma_m[0] == pytest.approx(1.0 / p.sigma_m[axis_src - 1])
        pair = solve_uniform(inc, dual, axis=axis_dual, n=256)
        t = np.linspace(0, 2 * math.pi, 64, endpoint=False)
        pts = 3.0 * inc.outer.max_radius() * np.column_stack([np.cos(t), np.sin(t)])
        vals, _ = eval_u(inc, pair, dual, pts)
        assert np.max(np.abs(vals - pair.h.value(pts))) < 1e-12


def test_solve_harmonic_requires_isotropic_matrix(design_case):
    inc, _, p = design_case
    assert not p.is_isotropic
    with pytest.raises(UnsupportedConfigurationError):
        solve_harmonic(inc, p, HarmonicPoly(cq=1.0), n=64)


def test_constant_background_rejected():
    inc = disks()
    p = ConductivityProfile.isotropic(5.0, 1.0, 2.0)
    with pytest.raises(ValidationError):
        solve_harmonic(inc, p, HarmonicPoly(c0=3.0), n=64)
    with pytest.raises(ValidationError):
        solve_uniform(inc, p, axis=3, n=64)
    with pytest.raises(ValidationError):
        HarmonicPoly.coordinate(0)


def test_probe_radius_precondition():
    inc = disks()
    p = ConductivityProfile.isotropic(5.0, 1.0, 2.0)
    with pytest.raises(ValidationError):
        neutrality_report(inc, p, n=64, probe_radius=1.5)


def test_harmonic_poly_gradient_consistency():
    h = HarmonicPoly(c0=0.3, cx=1.0, cy=-2.0, cq=0.7, cxy=0.4)
    pts = np.array([[0.3, -0.8], [1.1, 0.2]])
    eps = 1e-6
    for i, pt in enumerate(pts):
        fd_x = (h.value(np.array([pt + [eps, 0]]))[0] - h.value(np.array([pt - [eps, 0]]))[0]) / (2 * eps)
        fd_y = (h.value(np.array([pt + [0, eps]]))[0] - h.value(np.array([pt - [0, eps]]))[0]) / (2 * eps)
        assert h.gradient(pts)[i] == pytest.approx([fd_x, fd_y], abs=1e-8)
    assert HarmonicPoly().is_constant
    assert not h.is_constant


def test_decay_exponent_orders():
    inc = disks()
    neutral = ConductivityProfile.isotropic(5.0, 1.0, 2.0)
    off = ConductivityProfile.isotropic(5.0, 1.0, 2.4)
    # neutral coating kills the leading scattered mode of the quadratic
    # background, leaving one-order-faster decay
    q_neutral = decay_exponent(inc, neutral, HarmonicPoly(cq=1.0), (5.0, 10.0), n=128)
    assert q_neutral >= 1.8
    q_generic = decay_exponent(inc, off, HarmonicPoly(cx=1.0), (5.0, 10.0), n=128)
    assert q_generic == pytest.approx(1.0, abs=0.2)
    with pytest.raises(ValidationError):
        decay_exponent(inc, off, HarmonicPoly(cx=1.0), (2.0, 10.0), n=64)


def test_principal_profile_diagonalizes():
    theta = 0.3
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    sig = rot @ np.diag([2.0, 3.0]) @ rot.T
    theta_found, prof = principal_profile(sig, 5.0, 1.0)
    assert prof.sigma_m == pytest.approx((2.0, 3.0), abs=1e-12)
    back = np.array([[math.cos(theta_found), -math.sin(theta_found)],
                     [math.sin(theta_found), math.cos(theta_found)]])
    assert back @ np.diag(prof.sigma_m) @ back.T == pytest.approx(sig, abs=1e-12)
    with pytest.raises(ValidationError):
        principal_profile([[2.0, 0.5], [0.1, 3.0]], 5.0, 1.0)
