"""Newtonian potentials of plane domains and the coated-shell identities.

N_D(x) = (1/2pi) int_D ln|x - y| dA(y), reduced to the boundary through the
divergence identity div_y [(y - x)(2 ln|x - y| - 1)/4] = ln|x - y|, so only
the curve quadrature is ever needed. The gradient uses
grad N_D = -(S_dD[n_1], S_dD[n_2]), which is continuous across the boundary
and therefore also gives on-curve gradients through the on-boundary single
layer quadrature.

For a neutral coated inclusion with area fraction f = |D|/|Omega| the
combination G = N_D - f N_Omega is constant outside Omega and equals
d_1 x_1^2 + d_2 x_2^2 + const in D with d_j = (1 - f(1 +/- (mu1 - mu2)))/4.
The induced free problem for w = (f/2)|x|^2 + 2G has Laplace's equation in
the shell, grad w = f x on the outer boundary, and
grad w = x + kappa (x_1, -x_2) on the inner one, with kappa = -f (mu1 - mu2)
the design shear coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .geometry import CoatedInclusion, Discretization, discretize
from .layerpot import (
    _targets_xy,
    _near_guard,
    min_target_distance,
    single_layer_on_boundary,
    _REFINE_CAP,
    _REFINE_DECADES,
)
from .errors import NearEvaluationError


def _boundary_reduction(src: Discretization, pts: np.ndarray) -> np.ndarray:
    dx = pts[:, None, 0] - src.nodes[None, :, 0]
    dy = pts[:, None, 1] - src.nodes[None, :, 1]
    r2 = dx * dx + dy * dy
    flux = -(dx * src.normals[None, :, 0] + dy * src.normals[None, :, 1])
    integrand = flux * (np.log(r2) - 1.0) * 0.25
    return integrand @ src.weights / (2 * math.pi)


def newtonian_potential(src: Discretization, targets, min_distance=None) -> np.ndarray:
    """N_D at targets (either side of the curve, outside the near zone)."""
    pts = _targets_xy(targets)
    _near_guard(src, pts, min_distance)
    return _boundary_reduction(src, pts)


def newtonian_gradient(src: Discretization, targets, min_distance=None) -> np.ndarray:
    """grad N_D at off-curve targets, via -(S[n_1], S[n_2])."""
    from .layerpot import single_layer_off

    pts = _targets_xy(targets)
    gx = single_layer_off(src, src.normals[:, 0], pts, min_distance)
    gy = single_layer_off(src, src.normals[:, 1], pts, min_distance)
    return -np.column_stack([gx, gy])


def _fine_for(src: Discretization, pts: np.ndarray) -> Discretization:
    """Refined copy of the source grid adequate for arbitrarily close targets."""
    dist = min_target_distance(src, pts)
    if dist <= 0:
        raise NearEvaluationError("target lies on the source curve", distance=dist)
    smax = float(np.max(src.speed))
    need = max(2 * src.n, int(math.ceil(_REFINE_DECADES * smax / dist)))
    m = 1 << int(math.ceil(math.log2(need)))
    if m > _REFINE_CAP:
        raise NearEvaluationError(
            f"target at distance {dist:.3e} needs {m} quadrature nodes (> cap)",
            distance=dist,
        )
    return discretize(src.curve, m) if m != src.n else src


def newtonian_potential_near(src: Discretization, targets) -> np.ndarray:
    """N_D at targets that may sit close to the curve (adaptive upsampling)."""
    pts = _targets_xy(targets)
    return _boundary_reduction(_fine_for(src, pts), pts)


def newtonian_gradient_near(src: Discretization, targets) -> np.ndarray:
    """grad N_D near the curve (adaptive upsampling; never on it)."""
    pts = _targets_xy(targets)
    fine = _fine_for(src, pts)
    dx = pts[:, None, 0] - fine.nodes[None, :, 0]
    dy = pts[:, None, 1] - fine.nodes[None, :, 1]
    logr = 0.5 * np.log(dx * dx + dy * dy)
    # grad N = -(S[n1], S[n2]): single layer *values* with normal densities
    gx = logr @ (fine.normals[:, 0] * fine.weights)
    gy = logr @ (fine.normals[:, 1] * fine.weights)
    return -np.column_stack([gx, gy]) / (2 * math.pi)


def newtonian_gradient_on_boundary(src: Discretization) -> np.ndarray:
    """grad N_D sampled on the curve itself (single layers are continuous)."""
    gx = single_layer_on_boundary(src, src.normals[:, 0])
    gy = single_layer_on_boundary(src, src.normals[:, 1])
    return -np.column_stack([gx, gy])


@dataclass(frozen=True)
class QuadraticFit:
    """Least-squares fit d1 x^2 + d2 y^2 + c1 x + c2 y + const."""

    d1: float
    d2: float
    c1: float
    c2: float
    const: float
    rms_residual: float


@dataclass(frozen=True)
class CombinedIdentityReport:
    """Interior quadratic structure and exterior constancy of N_D - f N_Omega."""

    fit: QuadraticFit
    exterior_residual: float
    d_expected: tuple[float, float]
    d_mismatch: tuple[float, float]

    def as_dict(self) -> dict:
        return {
            "fit": {
                "d1": self.fit.d1,
                "d2": self.fit.d2,
                "c1": self.fit.c1,
                "c2": self.fit.c2,
                "const": self.fit.const,
                "rms_residual": self.fit.rms_residual,
            },
            "exterior_residual": self.exterior_residual,
            "d_expected": list(self.d_expected),
            "d_mismatch": list(self.d_mismatch),
        }


def _interior_grid(inc: CoatedInclusion, factors=(0.2, 0.4, 0.6), count: int = 16) -> np.ndarray:
    c0 = inc.inner.center
    t = 2 * math.pi * np.arange(count) / count
    z = inc.inner.point(t)
    pts = [c0 + s * (z - c0) for s in factors]
    pts = np.concatenate(pts)
    pts = np.column_stack([pts.real, pts.imag])
    return np.vstack([pts, [c0.real, c0.imag]])


def fit_quadratic(pts: np.ndarray, values: np.ndarray) -> QuadraticFit:
    x, y = pts[:, 0], pts[:, 1]
    basis = np.column_stack([x * x, y * y, x, y, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(basis, values, rcond=None)
    resid = basis @ coef - values
    rms = float(np.sqrt(np.mean(resid**2)))
    return QuadraticFit(*(float(c) for c in coef), rms)


def combined_identity_check(inc: CoatedInclusion, dr, n: int = 256) -> CombinedIdentityReport:
    """Fit N_D - f N_Omega inside D and test its constancy outside Omega.

    dr supplies the area fraction f and the contrast difference mu1 - mu2
    (a DesignResult, or anything with .f and .dmu); the expected interior
    coefficients are d_j = (1 - f (1 +/- dmu))/4.
    """
    f, dmu = float(dr.f), float(dr.dmu)
    d_in = discretize(inc.inner, n)
    d_out = discretize(inc.outer, n)

    pts = _interior_grid(inc)
    g_in = newtonian_potential(d_in, pts) - f * newtonian_potential(d_out, pts)
    fit = fit_quadratic(pts, g_in)

    r_probe = 3.0 * inc.outer.max_radius()
    t = 2 * math.pi * np.arange(64) / 64
    probe = r_probe * np.column_stack([np.cos(t), np.sin(t)])
    g_ext = newtonian_potential(d_in, probe) - f * newtonian_potential(d_out, probe)
    exterior = float(np.max(np.abs(g_ext - np.mean(g_ext))))

    d1e = (1.0 - f * (1.0 + dmu)) / 4.0
    d2e = (1.0 - f * (1.0 - dmu)) / 4.0
    return CombinedIdentityReport(
        fit, exterior, (d1e, d2e), (abs(fit.d1 - d1e), abs(fit.d2 - d2e))
    )


@dataclass(frozen=True)
class FreeBvpReport:
    """Residuals of the shell free boundary problem for w."""

    harmonicity_residual: float
    outer_bc_residual: float
    inner_bc_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.harmonicity_residual, self.outer_bc_residual, self.inner_bc_residual)

    def as_dict(self) -> dict:
        return {
            "harmonicity_residual": self.harmonicity_residual,
            "outer_bc_residual": self.outer_bc_residual,
            "inner_bc_residual": self.inner_bc_residual,
        }


def _shell_midpoints(inc: CoatedInclusion, count: int) -> np.ndarray:
    t = 2 * math.pi * np.arange(count) / count
    if inc.origin is not None:
        z = inc.origin.map_point(math.sqrt(inc.origin.r0) * np.exp(1j * t))
    else:
        z = 0.5 * (inc.inner.point(t) + inc.outer.point(t))
    return np.column_stack([z.real, z.imag])


def free_bvp_residual(
    inc: CoatedInclusion,
    f: float,
    shear: float,
    n: int = 256,
    shell_points: int = 32,
    step_factor: float = 2e-4,
) -> FreeBvpReport:
    """Check w = (f/2)|x|^2 + 2(N_D - f N_Omega) against its free problem.

    Harmonicity is measured by a five-point Laplacian at mid-shell points
    (step = step_factor x outer diameter); the boundary conditions
    grad w = f x on the outer curve and grad w = x + shear (x1, -x2) on the
    inner one are evaluated at the quadrature nodes.
    """
    if not (0.0 < f < 1.0):
        raise ValidationError(f"area fraction must lie in (0, 1), got {f}")
    d_in = discretize(inc.inner, n)
    d_out = discretize(inc.outer, n)

    def w(pts):
        return 0.5 * f * np.sum(pts * pts, axis=1) + 2.0 * (
            newtonian_potential_near(d_in, pts) - f * newtonian_potential_near(d_out, pts)
        )

    mid = _shell_midpoints(inc, shell_points)
    h = step_factor * 2.0 * inc.outer.max_radius()
    stencil = np.concatenate(
        [mid, mid + [h, 0], mid - [h, 0], mid + [0, h], mid - [0, h]]
    )
    vals = w(stencil).reshape(5, -1)
    lap = (vals[1] + vals[2] + vals[3] + vals[4] - 4.0 * vals[0]) / h**2
    harmonicity = float(np.max(np.abs(lap)))

    # outer condition: grad w - f x = 2 (grad N_D - f grad N_Omega) -> 0 on dOmega
    g_d = newtonian_gradient_near(d_in, d_out.nodes)
    g_o = newtonian_gradient_on_boundary(d_out)
    outer = float(np.max(np.linalg.norm(2.0 * (g_d - f * g_o), axis=1)))

    # inner condition: grad w = x + shear (x1, -x2) on dD
    g_d_in = newtonian_gradient_on_boundary(d_in)
    g_o_in = newtonian_gradient_near(d_out, d_in.nodes)
    grad_w = f * d_in.nodes + 2.0 * (g_d_in - f * g_o_in)
    target = d_in.nodes + shear * np.column_stack([d_in.nodes[:, 0], -d_in.nodes[:, 1]])
    inner = float(np.max(np.linalg.norm(grad_w - target, axis=1)))

    return FreeBvpReport(harmonicity, outer, inner)
