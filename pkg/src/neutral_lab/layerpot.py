"""Dense Nystrom operators for the 2-d single layer potential.

Conventions: S[phi](x) = (1/2pi) int ln|x - y| phi(y) dsigma(y), with the
adjoint double layer K*[phi](x) = (1/2pi) int <x - y, nu_x>/|x - y|^2 phi dsigma.
Off-boundary evaluation uses the plain trapezoid rule, which is spectrally
accurate away from the curve; targets inside the near zone are refused rather
than silently degraded. On-boundary values split off the periodic log kernel
ln|2 sin((t - s)/2)| and integrate it with its exact Fourier multipliers
-1/(2|k|) (the remaining factor is smooth).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NearEvaluationError, ValidationError
from .geometry import Discretization, discretize

NEAR_FACTOR = 0.2
_REFINE_DECADES = 40.0  # target exp(-40) ~ 4e-18 quadrature tail
_REFINE_CAP = 2**17


def feature_size(src: Discretization) -> float:
    """Smallest osculating radius of the source curve, 1/max|kappa|."""
    return 1.0 / float(np.max(np.abs(src.curvature)))


def _targets_xy(targets) -> np.ndarray:
    pts = np.asarray(targets, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError(f"targets must have shape (m, 2), got {pts.shape}")
    return pts


def _check_density(src: Discretization, density) -> np.ndarray:
    rho = np.asarray(density)
    if rho.shape != (src.n,):
        raise ValidationError(
            f"density must match the {src.n}-node grid, got shape {rho.shape}"
        )
    return rho


def min_target_distance(src: Discretization, targets) -> float:
    pts = _targets_xy(targets)
    d2 = (pts[:, None, 0] - src.nodes[None, :, 0]) ** 2 + (
        pts[:, None, 1] - src.nodes[None, :, 1]
    ) ** 2
    return float(np.sqrt(d2.min()))


def _near_guard(src: Discretization, targets, min_distance: float | None) -> None:
    limit = NEAR_FACTOR * feature_size(src) if min_distance is None else min_distance
    dist = min_target_distance(src, targets)
    if dist < limit:
        raise NearEvaluationError(
            f"target at distance {dist:.3e} from the source curve is inside the "
            f"near zone ({limit:.3e}); evaluate farther away or use the refined path",
            distance=dist,
            limit=limit,
        )


def single_layer_off(src: Discretization, density, targets, min_distance=None) -> np.ndarray:
    """S[density] at off-curve targets (plain trapezoid; near zone refused)."""
    rho = _check_density(src, density)
    pts = _targets_xy(targets)
    _near_guard(src, pts, min_distance)
    dx = pts[:, None, 0] - src.nodes[None, :, 0]
    dy = pts[:, None, 1] - src.nodes[None, :, 1]
    r2 = dx * dx + dy * dy
    return (0.5 * np.log(r2)) @ (rho * src.weights) / (2 * math.pi)


def single_layer_grad_off(src: Discretization, density, targets, min_distance=None) -> np.ndarray:
    """grad S[density] at off-curve targets, shape (m, 2)."""
    rho = _check_density(src, density)
    pts = _targets_xy(targets)
    _near_guard(src, pts, min_distance)
    dx = pts[:, None, 0] - src.nodes[None, :, 0]
    dy = pts[:, None, 1] - src.nodes[None, :, 1]
    r2 = dx * dx + dy * dy
    rw = rho * src.weights
    gx = (dx / r2) @ rw
    gy = (dy / r2) @ rw
    return np.column_stack([gx, gy]) / (2 * math.pi)


def kstar_matrix(src: Discretization) -> np.ndarray:
    """Nystrom matrix of K* on the source grid (weights folded in).

    The diagonal carries the limiting kernel value kappa(x)/2, so entries are
    kappa_i w_i /(4 pi) there; on a circle every entry is w_j/(4 pi).
    """
    dx = src.nodes[:, None, 0] - src.nodes[None, :, 0]
    dy = src.nodes[:, None, 1] - src.nodes[None, :, 1]
    r2 = dx * dx + dy * dy
    np.fill_diagonal(r2, 1.0)
    kern = (dx * src.normals[:, None, 0] + dy * src.normals[:, None, 1]) / r2
    np.fill_diagonal(kern, 0.5 * src.curvature)
    return kern * src.weights[None, :] / (2 * math.pi)


def normal_derivative_coupling(src: Discretization, tgt: Discretization) -> np.ndarray:
    """Matrix of d/dnu_tgt S_src[.] sampled at the target nodes.

    Source and target must be disjoint curves; the kernel is then smooth and
    plain trapezoid weights are spectrally accurate.
    """
    dx = tgt.nodes[:, None, 0] - src.nodes[None, :, 0]
    dy = tgt.nodes[:, None, 1] - src.nodes[None, :, 1]
    r2 = dx * dx + dy * dy
    if float(r2.min()) < 1e-24:
        raise ValidationError("source and target curves touch; coupling kernel is singular")
    kern = (dx * tgt.normals[:, None, 0] + dy * tgt.normals[:, None, 1]) / r2
    return kern * src.weights[None, :] / (2 * math.pi)


def single_layer_on_boundary(src: Discretization, density) -> np.ndarray:
    """S[density] on the source curve itself (Kress-split product quadrature).

    ln|z(t)-z(s)| = ln|2 sin((t-s)/2)| + smooth; the log part acts diagonally
    in Fourier space with multipliers -1/(2|k|) (0 for k = 0), the smooth part
    goes through the trapezoid rule with diagonal limit ln|z'(t)|.
    """
    rho = _check_density(src, density)
    n = src.n
    g = rho * src.speed

    freqs = np.fft.fftfreq(n, d=1.0 / n)
    mult = np.zeros(n)
    nonzero = freqs != 0
    mult[nonzero] = -0.5 / np.abs(freqs[nonzero])
    log_part = np.fft.ifft(np.fft.fft(g) * mult)
    if np.isrealobj(rho):
        log_part = log_part.real

    z = src.nodes_z
    dz = np.abs(z[:, None] - z[None, :])
    dt = src.t[:, None] - src.t[None, :]
    sins = np.abs(2.0 * np.sin(0.5 * dt))
    np.fill_diagonal(dz, 1.0)
    np.fill_diagonal(sins, 1.0)
    remainder = np.log(dz / sins)
    np.fill_diagonal(remainder, np.log(src.speed))
    smooth_part = (remainder @ g) / n

    return smooth_part + log_part


def resample_periodic(values: np.ndarray, m: int) -> np.ndarray:
    """Trigonometric interpolation of periodic nodal data from n to m nodes."""
    values = np.asarray(values)
    n = len(values)
    if m == n:
        return values.copy()
    if m < n:
        raise ValidationError("resample target must not be coarser than the data")
    spec = np.fft.fft(values)
    out = np.zeros(m, dtype=complex)
    half = n // 2
    out[:half] = spec[:half]
    out[m - half + 1 :] = spec[half + 1 :]
    # split the Nyquist bin symmetrically (n even throughout this package)
    out[half] = 0.5 * spec[half]
    out[m - half] += 0.5 * spec[half]
    out *= m / n
    fine = np.fft.ifft(out)
    return fine.real if np.isrealobj(values) else fine


def _refined_source(src: Discretization, density, targets):
    """Upsample source and density until the trapezoid tail is negligible."""
    pts = _targets_xy(targets)
    dist = min_target_distance(src, pts)
    if dist <= 0:
        raise NearEvaluationError("target lies on the source curve", distance=dist, limit=0.0)
    smax = float(np.max(src.speed))
    need = max(2 * src.n, int(math.ceil(_REFINE_DECADES * smax / dist)))
    m = 1 << int(math.ceil(math.log2(need)))
    if m > _REFINE_CAP:
        raise NearEvaluationError(
            f"target at distance {dist:.3e} needs {m} nodes (> cap {_REFINE_CAP})",
            distance=dist,
        )
    fine = discretize(src.curve, m)
    return fine, resample_periodic(np.asarray(density), m), pts


def single_layer_near(src: Discretization, density, targets) -> np.ndarray:
    """S[density] at targets arbitrarily close to (but not on) the curve."""
    fine, rho, pts = _refined_source(src, density, targets)
    out = np.empty(len(pts), dtype=rho.dtype if np.iscomplexobj(rho) else float)
    block = max(1, int(4e6) // fine.n)
    rw = rho * fine.weights
    for lo in range(0, len(pts), block):
        s = slice(lo, lo + block)
        dx = pts[s, None, 0] - fine.nodes[None, :, 0]
        dy = pts[s, None, 1] - fine.nodes[None, :, 1]
        out[s] = (0.5 * np.log(dx * dx + dy * dy)) @ rw / (2 * math.pi)
    return out


def single_layer_grad_near(src: Discretization, density, targets) -> np.ndarray:
    """grad S[density] at targets arbitrarily close to (but not on) the curve."""
    fine, rho, pts = _refined_source(src, density, targets)
    out = np.empty((len(pts), 2))
    block = max(1, int(4e6) // fine.n)
    rw = rho * fine.weights
    for lo in range(0, len(pts), block):
        s = slice(lo, lo + block)
        dx = pts[s, None, 0] - fine.nodes[None, :, 0]
        dy = pts[s, None, 1] - fine.nodes[None, :, 1]
        r2 = dx * dx + dy * dy
        out[s, 0] = (dx / r2) @ rw
        out[s, 1] = (dy / r2) @ rw
    return out / (2 * math.pi)
