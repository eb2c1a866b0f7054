"""Two-interface conductivity transmission problem via single layer potentials.

The field for background h is represented as u = h + S_inner[phi] + S_outer[psi]
with densities solving the block system

    (lam I - K*_inner) phi -  dnu S_outer[psi]          = dh/dnu   on the core boundary
    -dnu S_inner[phi]      + (mu I - K*_outer) psi      = dh/dnu   on the coating boundary

where lam, mu are the core/shell and shell/matrix contrast parameters. The
representation stays valid in the perfectly insulating (sigma_c = 0) and
perfectly conducting (sigma_c = inf) limits, where lam = -1/2 and +1/2. Both
densities live in the mean-zero subspace; a rank-one weighted-mean term is
added to each diagonal block so the discrete system stays uniquely solvable
at the extreme contrasts.

A diagonal anisotropic matrix conductivity diag(sigma_m^1, sigma_m^2) is
handled by giving the axis-j solve the isotropic value sigma_m^j; a general
symmetric tensor must first be rotated to principal axes (`principal_profile`)
together with the geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    SolverError,
    UnsupportedConfigurationError,
    ValidationError,
)
from .geometry import CoatedInclusion, Discretization, discretize
from .layerpot import (
    kstar_matrix,
    normal_derivative_coupling,
    single_layer_grad_near,
    single_layer_grad_off,
    single_layer_off,
)

DEFAULT_NODES = 256
PROBE_POINTS = 64
OFFSET_EPS = 1e-2  # boundary offset for one-sided flux recovery (Richardson halved)


@dataclass(frozen=True)
class ConductivityProfile:
    """Piecewise-constant conductivities (core, shell, matrix-diagonal).

    sigma_c may be 0 (insulating core) or math.inf (perfectly conducting
    core); sigma_s and both matrix components must be positive, finite, and
    distinct from sigma_s (equal conductivities make the corresponding
    interface trivial and the contrast parameter undefined).
    """

    sigma_c: float
    sigma_s: float
    sigma_m: tuple[float, float]

    def __post_init__(self):
        sc, ss = float(self.sigma_c), float(self.sigma_s)
        sm = tuple(float(v) for v in self.sigma_m)
        if len(sm) != 2:
            raise ValidationError("sigma_m must be a pair (diagonal tensor)")
        if not (math.isfinite(ss) and ss > 0):
            raise ValidationError(f"shell conductivity must be positive finite, got {ss}")
        if math.isnan(sc) or sc < 0:
            raise ValidationError(f"core conductivity must be >= 0 (inf allowed), got {sc}")
        if sc == ss:
            raise ValidationError("core and shell conductivities must differ")
        for j, v in enumerate(sm, start=1):
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"sigma_m^{j} must be positive finite, got {v}")
            if v == ss:
                raise ValidationError(f"sigma_m^{j} equals the shell conductivity")
        object.__setattr__(self, "sigma_c", sc)
        object.__setattr__(self, "sigma_s", ss)
        object.__setattr__(self, "sigma_m", sm)

    @classmethod
    def isotropic(cls, sigma_c, sigma_s, sigma_m) -> "ConductivityProfile":
        return cls(sigma_c, sigma_s, (sigma_m, sigma_m))

    @property
    def is_isotropic(self) -> bool:
        return self.sigma_m[0] == self.sigma_m[1]


@dataclass(frozen=True)
class ContrastParams:
    """Contrast parameters lam (core/shell) and mu_j (shell/matrix^j)."""

    lam: float
    mu: tuple[float, float]


def contrasts(p: ConductivityProfile) -> ContrastParams:
    """lam = (sc+ss)/(2(sc-ss)), mu_j = (ss+sm_j)/(2(ss-sm_j)).

    sigma_c = 0 and inf land exactly on lam = -1/2 and +1/2. Physical
    profiles always give |mu_j| > 1/2.
    """
    sc, ss = p.sigma_c, p.sigma_s
    lam = 0.5 if math.isinf(sc) else (sc + ss) / (2.0 * (sc - ss))
    mu = tuple((ss + sm) / (2.0 * (ss - sm)) for sm in p.sigma_m)
    return ContrastParams(lam, mu)


@dataclass(frozen=True)
class HarmonicPoly:
    """Harmonic polynomial c0 + cx x + cy y + cq (x^2 - y^2) + cxy xy."""

    c0: float = 0.0
    cx: float = 0.0
    cy: float = 0.0
    cq: float = 0.0
    cxy: float = 0.0

    @classmethod
    def coordinate(cls, axis: int) -> "HarmonicPoly":
        if axis == 1:
            return cls(cx=1.0)
        if axis == 2:
            return cls(cy=1.0)
        raise ValidationError(f"axis must be 1 or 2, got {axis}")

    @property
    def is_constant(self) -> bool:
        return self.cx == self.cy == self.cq == self.cxy == 0.0

    def value(self, pts: np.ndarray) -> np.ndarray:
        x, y = pts[:, 0], pts[:, 1]
        return (
            self.c0
            + self.cx * x
            + self.cy * y
            + self.cq * (x * x - y * y)
            + self.cxy * x * y
        )

    def gradient(self, pts: np.ndarray) -> np.ndarray:
        x, y = pts[:, 0], pts[:, 1]
        gx = self.cx + 2.0 * self.cq * x + self.cxy * y
        gy = self.cy - 2.0 * self.cq * y + self.cxy * x
        return np.column_stack([gx, gy])


@dataclass(frozen=True, eq=False)
class DensityPair:
    """Solution densities on the two boundaries, plus the grids they live on."""

    phi: np.ndarray
    psi: np.ndarray
    axis: int | None
    h: HarmonicPoly
    disc_inner: Discretization
    disc_outer: Discretization


def _weighted_mean(values: np.ndarray, weights: np.ndarray) -> float:
    return float(np.dot(values, weights) / np.sum(weights))


def _operator_parts(d_in, d_out):
    """The contrast-independent pieces of the block system."""
    return (
        kstar_matrix(d_in),
        kstar_matrix(d_out),
        normal_derivative_coupling(d_out, d_in),
        normal_derivative_coupling(d_in, d_out),
    )


def _solve_blocks(d_in, d_out, lam, mu, rhs_in, rhs_out, parts=None):
    n1, n2 = d_in.n, d_out.n
    per_in = float(np.sum(d_in.weights))
    per_out = float(np.sum(d_out.weights))
    k_in, k_out, c_oi, c_io = parts if parts is not None else _operator_parts(d_in, d_out)

    a = np.zeros((n1 + n2, n1 + n2))
    a[:n1, :n1] = lam * np.eye(n1) - k_in
    a[:n1, n1:] = -c_oi
    a[n1:, :n1] = -c_io
    a[n1:, n1:] = mu * np.eye(n2) - k_out
    # the weights are a left eigenvector of the discrete K* with eigenvalue
    # 1/2, so the weighted-mean term turns the block row functional into
    # (contrast + 1/2) w^T: required at +1/2 (conducting core), harmless for
    # contrast >= 0, and singular at -1/2 (insulating core) where the
    # unaugmented block is already invertible. Augment only when safe.
    if lam >= 0.0:
        a[:n1, :n1] += np.outer(np.ones(n1), d_in.weights) / per_in
    if mu >= 0.0:
        a[n1:, n1:] += np.outer(np.ones(n2), d_out.weights) / per_out

    # the continuous right sides have exact mean zero; project off the
    # quadrature-level remainder so the rank-one terms see clean data
    b = np.concatenate(
        [
            rhs_in - _weighted_mean(rhs_in, d_in.weights),
            rhs_out - _weighted_mean(rhs_out, d_out.weights),
        ]
    )
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SolverError(
            f"transmission system singular (lam={lam}, mu={mu})",
            cond=float(np.linalg.cond(a)),
        ) from exc
    if not np.all(np.isfinite(x)):
        raise SolverError("transmission solve produced non-finite densities")
    return x[:n1], x[n1:]


def solve_uniform(
    inc: CoatedInclusion, p: ConductivityProfile, axis: int, n: int = DEFAULT_NODES
) -> DensityPair:
    """Densities for the uniform background h = x_axis (axis in {1, 2}).

    The axis-j solve uses the matrix component sigma_m^j.
    """
    if axis not in (1, 2):
        raise ValidationError(f"axis must be 1 or 2, got {axis}")
    cp = contrasts(p)
    d_in = discretize(inc.inner, n)
    d_out = discretize(inc.outer, n)
    j = axis - 1
    phi, psi = _solve_blocks(
        d_in, d_out, cp.lam, cp.mu[j], d_in.normals[:, j], d_out.normals[:, j]
    )
    return DensityPair(phi, psi, axis, HarmonicPoly.coordinate(axis), d_in, d_out)


def solve_both_axes(
    inc: CoatedInclusion, p: ConductivityProfile, n: int = DEFAULT_NODES
) -> tuple[DensityPair, DensityPair]:
    """Both coordinate-background solves, sharing discretization and assembly.

    Only the mu-diagonal of the outer block differs between the axes, so
    the operator blocks are built once.
    """
    cp = contrasts(p)
    d_in = discretize(inc.inner, n)
    d_out = discretize(inc.outer, n)
    parts = _operator_parts(d_in, d_out)
    pairs = []
    for axis in (1, 2):
        j = axis - 1
        phi, psi = _solve_blocks(
            d_in, d_out, cp.lam, cp.mu[j],
            d_in.normals[:, j], d_out.normals[:, j], parts=parts,
        )
        pairs.append(DensityPair(phi, psi, axis, HarmonicPoly.coordinate(axis), d_in, d_out))
    return pairs[0], pairs[1]


def solve_harmonic(
    inc: CoatedInclusion, p: ConductivityProfile, h: HarmonicPoly, n: int = DEFAULT_NODES
) -> DensityPair:
    """Densities for a general harmonic polynomial background.

    Requires an isotropic matrix (the per-axis decomposition used for
    diagonal tensors only applies to coordinate backgrounds).
    """
    if not p.is_isotropic:
        raise UnsupportedConfigurationError(
            "polynomial backgrounds need an isotropic matrix conductivity"
        )
    if h.is_constant:
        raise ValidationError("background is constant; nothing to solve")
    cp = contrasts(p)
    d_in = discretize(inc.inner, n)
    d_out = discretize(inc.outer, n)
    phi, psi = _solve_blocks(
        d_in,
        d_out,
        cp.lam,
        cp.mu[0],
        np.sum(h.gradient(d_in.nodes) * d_in.normals, axis=1),
        np.sum(h.gradient(d_out.nodes) * d_out.normals, axis=1),
    )
    return DensityPair(phi, psi, None, h, d_in, d_out)


def eval_u(
    inc: CoatedInclusion, pair: DensityPair, p: ConductivityProfile, points
) -> tuple[np.ndarray, np.ndarray]:
    """Field values and gradients u, grad u at points outside both near zones."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    vals = (
        pair.h.value(pts)
        + single_layer_off(pair.disc_inner, pair.phi, pts)
        + single_layer_off(pair.disc_outer, pair.psi, pts)
    )
    grads = (
        pair.h.gradient(pts)
        + single_layer_grad_off(pair.disc_inner, pair.phi, pts)
        + single_layer_grad_off(pair.disc_outer, pair.psi, pts)
    )
    return vals, grads


def _probe_circle(radius: float, m: int) -> np.ndarray:
    t = 2 * math.pi * np.arange(m) / m
    return radius * np.column_stack([np.cos(t), np.sin(t)])


def _scattered_values(pair: DensityPair, pts: np.ndarray) -> np.ndarray:
    """u - h, i.e. the layer-potential part alone."""
    return single_layer_off(pair.disc_inner, pair.phi, pts) + single_layer_off(
        pair.disc_outer, pair.psi, pts
    )


def _core_grid(inc: CoatedInclusion, count: int = 16) -> np.ndarray:
    """Half-scale copy of the core boundary plus its center (interior points)."""
    c0 = inc.inner.center
    t = 2 * math.pi * np.arange(count) / count
    z = c0 + 0.5 * (inc.inner.point(t) - c0)
    pts = np.column_stack([z.real, z.imag])
    return np.vstack([pts, [c0.real, c0.imag]])


def _interior_gradient(pair: DensityPair, pts: np.ndarray) -> np.ndarray:
    return (
        pair.h.gradient(pts)
        + single_layer_grad_off(pair.disc_inner, pair.phi, pts)
        + single_layer_grad_off(pair.disc_outer, pair.psi, pts)
    )


def _inner_flux(pair: DensityPair, eps: float = OFFSET_EPS) -> np.ndarray:
    """Interior normal derivative of u on the core boundary.

    One-sided offsets x - eps nu with two-point Richardson in eps; the
    inner-curve contribution is evaluated on an upsampled grid because the
    offsets sit deep inside the plain-quadrature near zone.
    """
    d_in = pair.disc_inner
    out = []
    for e in (eps, 0.5 * eps):
        pts = d_in.nodes - e * d_in.normals
        grad = (
            pair.h.gradient(pts)
            + single_layer_grad_near(d_in, pair.phi, pts)
            + single_layer_grad_off(pair.disc_outer, pair.psi, pts)
        )
        out.append(np.sum(grad * d_in.normals, axis=1))
    g_e, g_half = out
    return 2.0 * g_half - g_e


@dataclass(frozen=True)
class AxisReport:
    """Diagnostics for one uniform-field solve."""

    axis: int
    residual: float
    first_moment: tuple[float, float]
    core_gradient_mean: tuple[float, float]
    core_gradient_deviation: float
    core_slope_measured: float
    core_slope_predicted: float
    flux_identity_residual: float
    coating_identity_residual: float
    density_means: tuple[float, float]


@dataclass(frozen=True)
class NeutralityReport:
    """Per-axis neutrality diagnostics on a far probe circle.

    residual is max |u - x_j| over the probe. flux_identity_residual compares
    phi with (2/(2 lam - 1)) du/dnu|- (for lam = 1/2 the rearranged residual
    ((2 lam - 1)/2) phi - du/dnu|- is reported, both sides vanishing there).
    coating_identity_residual compares psi with (2/(2 mu_j + 1)) n_j, which is
    an identity only for neutral configurations.
    """

    probe_radius: float
    nodes: int
    lam: float
    mu: tuple[float, float]
    axes: tuple[AxisReport, AxisReport]

    @property
    def residuals(self) -> tuple[float, float]:
        return (self.axes[0].residual, self.axes[1].residual)

    def as_dict(self) -> dict:
        return {
            "probe_radius": self.probe_radius,
            "nodes": self.nodes,
            "lambda": self.lam,
            "mu": list(self.mu),
            "axes": [
                {
                    "axis": ax.axis,
                    "residual": ax.residual,
                    "first_moment": list(ax.first_moment),
                    "core_gradient_mean": list(ax.core_gradient_mean),
                    "core_gradient_deviation": ax.core_gradient_deviation,
                    "core_slope_measured": ax.core_slope_measured,
                    "core_slope_predicted": ax.core_slope_predicted,
                    "flux_identity_residual": ax.flux_identity_residual,
                    "coating_identity_residual": ax.coating_identity_residual,
                    "density_means": list(ax.density_means),
                }
                for ax in self.axes
            ],
        }


def neutrality_report(
    inc: CoatedInclusion,
    p: ConductivityProfile,
    n: int = DEFAULT_NODES,
    probe_radius: float | None = None,
    probe_points: int = PROBE_POINTS,
) -> NeutralityReport:
    """Solve both axes and measure how invisible the inclusion is."""
    r_out = inc.outer.max_radius()
    if probe_radius is None:
        probe_radius = 3.0 * r_out
    if probe_radius < 2.0 * r_out:
        raise ValidationError(
            f"probe radius {probe_radius} too tight; needs margin of at least "
            f"the outer max radius ({r_out:.4f})"
        )
    probe = _probe_circle(probe_radius, probe_points)
    core = _core_grid(inc)
    cp = contrasts(p)
    axes = []
    for pair in solve_both_axes(inc, p, n):
        axis = pair.axis
        j = axis - 1

        residual = float(np.max(np.abs(_scattered_values(pair, probe))))

        moment = (
            pair.disc_inner.nodes.T @ (pair.phi * pair.disc_inner.weights)
            + pair.disc_outer.nodes.T @ (pair.psi * pair.disc_outer.weights)
        )

        grads = _interior_gradient(pair, core)
        gmean = grads.mean(axis=0)
        gdev = float(np.max(np.linalg.norm(grads - gmean, axis=1)))
        slope_measured = float(gmean[j])
        denom = 2.0 * cp.lam * (2.0 * cp.mu[j] + 1.0)
        slope_predicted = (2.0 * cp.lam - 1.0) * (cp.mu[0] + cp.mu[1]) / denom

        flux = _inner_flux(pair)
        if abs(2.0 * cp.lam - 1.0) > 1e-9:
            flux_resid = float(np.max(np.abs(pair.phi - 2.0 / (2.0 * cp.lam - 1.0) * flux)))
        else:
            flux_resid = float(np.max(np.abs(0.5 * (2.0 * cp.lam - 1.0) * pair.phi - flux)))

        coat_resid = float(
            np.max(np.abs(pair.psi - 2.0 / (2.0 * cp.mu[j] + 1.0) * pair.disc_outer.normals[:, j]))
        )

        means = (
            _weighted_mean(pair.phi, pair.disc_inner.weights),
            _weighted_mean(pair.psi, pair.disc_outer.weights),
        )
        axes.append(
            AxisReport(
                axis=axis,
                residual=residual,
                first_moment=(float(moment[0]), float(moment[1])),
                core_gradient_mean=(float(gmean[0]), float(gmean[1])),
                core_gradient_deviation=gdev,
                core_slope_measured=slope_measured,
                core_slope_predicted=float(slope_predicted),
                flux_identity_residual=flux_resid,
                coating_identity_residual=coat_resid,
                density_means=means,
            )
        )
    return NeutralityReport(float(probe_radius), n, cp.lam, cp.mu, (axes[0], axes[1]))


def decay_exponent(
    inc: CoatedInclusion,
    p: ConductivityProfile,
    h: HarmonicPoly,
    radii: tuple[float, float],
    n: int = DEFAULT_NODES,
    probe_points: int = PROBE_POINTS,
) -> float:
    """Far-field decay rate of u - h between two probe radii.

    Fits max|u - h| ~ R^(-q) through the two radii and returns q. A neutral
    configuration driven by a non-uniform background decays one order faster
    (q ~ 2) than a generic one (q ~ 1).
    """
    r1, r2 = (float(r) for r in radii)
    r_out = inc.outer.max_radius()
    if not (r2 > r1 > 2.0 * r_out):
        raise ValidationError(
            f"need probe radii r2 > r1 > twice the outer max radius ({2 * r_out:.4f}), "
            f"got ({r1}, {r2})"
        )
    pair = solve_harmonic(inc, p, h, n)
    res1 = float(np.max(np.abs(_scattered_values(pair, _probe_circle(r1, probe_points)))))
    res2 = float(np.max(np.abs(_scattered_values(pair, _probe_circle(r2, probe_points)))))
    if res1 <= 0.0 or res2 <= 0.0:
        raise SolverError("scattered field vanished on a probe circle; exponent undefined")
    return math.log(res1 / res2) / math.log(r2 / r1)


def principal_profile(sigma_matrix, sigma_c, sigma_s):
    """Diagonalize a symmetric 2x2 matrix conductivity.

    Returns (theta, profile): sigma_matrix = R(theta) diag(sigma_m) R(theta)^T.
    Rotate the geometry by -theta (CoatedInclusion.rotated) to use the
    axis-aligned pipeline, then rotate fields back.
    """
    s = np.asarray(sigma_matrix, dtype=float)
    if s.shape != (2, 2) or abs(s[0, 1] - s[1, 0]) > 1e-12 * np.abs(s).max():
        raise ValidationError("matrix conductivity must be symmetric 2x2")
    vals, vecs = np.linalg.eigh(s)
    # eigh sorts ascending; keep the first eigenvector as the new x-axis
    theta = math.atan2(vecs[1, 0], vecs[0, 0])
    profile = ConductivityProfile(sigma_c, sigma_s, (float(vals[0]), float(vals[1])))
    return theta, profile
