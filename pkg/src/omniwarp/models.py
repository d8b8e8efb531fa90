"""Lens models: pinhole, extended unified (EUCM) and double sphere (DS).

Each model maps camera-frame 3D points to fractional pixels and back.
Projection formulas follow the standard closed forms for these families;
out-of-domain rays are reported through a validity mask, never an error.
The effective focal length is always ``f * output_scale``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import UnachievableFovError, ValidationError
from .geometry import ImageSize, normalize


@dataclass(frozen=True)
class PinholeParams:
    f: float
    cx: float
    cy: float

    def __post_init__(self):
        if not self.f > 0:
            raise ValidationError(f"pinhole focal must be positive, got {self.f}")


@dataclass(frozen=True)
class EucmParams:
    f: float
    alpha: float  # shape, (0, 1]
    beta: float   # distortion, > 0
    cx: float
    cy: float

    def __post_init__(self):
        if not self.f > 0:
            raise ValidationError(f"eucm focal must be positive, got {self.f}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValidationError(f"eucm alpha must be in (0, 1], got {self.alpha}")
        if not self.beta > 0:
            raise ValidationError(f"eucm beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class DsParams:
    f: float
    alpha: float  # blending, (0, 1]
    xi: float     # sphere-center offset, >= 0
    cx: float
    cy: float

    def __post_init__(self):
        if not self.f > 0:
            raise ValidationError(f"ds focal must be positive, got {self.f}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValidationError(f"ds alpha must be in (0, 1], got {self.alpha}")
        if self.xi < 0:
            raise ValidationError(f"ds xi must be non-negative, got {self.xi}")


Params = PinholeParams | EucmParams | DsParams


@dataclass(frozen=True)
class CameraModel:
    params: Params
    output_scale: float = 1.0

    def __post_init__(self):
        if not isinstance(self.params, (PinholeParams, EucmParams, DsParams)):
            raise ValidationError(f"unsupported parameter type {type(self.params).__name__}")
        if not self.output_scale > 0:
            raise ValidationError(f"output_scale must be positive, got {self.output_scale}")

    @property
    def f_eff(self) -> float:
        return self.params.f * self.output_scale

    @property
    def cx(self) -> float:
        return self.params.cx

    @property
    def cy(self) -> float:
        return self.params.cy

    @property
    def family(self) -> str:
        return {PinholeParams: "pinhole", EucmParams: "eucm", DsParams: "ds"}[type(self.params)]

    def with_focal(self, f: float) -> "CameraModel":
        return CameraModel(dataclasses.replace(self.params, f=f), self.output_scale)


_EPS = 1e-12


def _half_space_w(alpha: float) -> float:
    return alpha / (1.0 - alpha) if alpha <= 0.5 else (1.0 - alpha) / alpha


def project(model: CameraModel, points):
    """Project camera-frame 3D points to fractional pixels.

    Returns (uv, valid) where uv has shape points.shape[:-1] + (2,).
    Invalid entries carry unspecified coordinates.
    """
    p = np.asarray(points, dtype=np.float64)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    fe, cx, cy = model.f_eff, model.cx, model.cy
    par = model.params

    if isinstance(par, PinholeParams):
        valid = z > _EPS
        zs = np.where(valid, z, 1.0)
        u = fe * x / zs + cx
        v = fe * y / zs + cy
    elif isinstance(par, EucmParams):
        a, b = par.alpha, par.beta
        d = np.sqrt(b * (x * x + y * y) + z * z)
        denom = a * d + (1.0 - a) * z
        valid = (denom > _EPS) & (z > -_half_space_w(a) * d)
        denom = np.where(valid, denom, 1.0)
        u = fe * x / denom + cx
        v = fe * y / denom + cy
    else:
        a, xi = par.alpha, par.xi
        d1 = np.sqrt(x * x + y * y + z * z)
        zz = xi * d1 + z
        d2 = np.sqrt(x * x + y * y + zz * zz)
        denom = a * d2 + (1.0 - a) * zz
        w1 = _half_space_w(a)
        w2 = (w1 + xi) / np.sqrt(2.0 * w1 * xi + xi * xi + 1.0)
        valid = (denom > _EPS) & (z > -w2 * d1)
        denom = np.where(valid, denom, 1.0)
        u = fe * x / denom + cx
        v = fe * y / denom + cy

    return np.stack([u, v], axis=-1), valid


def unproject(model: CameraModel, u, v):
    """Fractional pixels -> unit ray directions.

    Returns (dirs, valid).  Validity fails where the model's inverse
    square-root argument is negative (outside the image circle).
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    fe, cx, cy = model.f_eff, model.cx, model.cy
    mx = (u - cx) / fe
    my = (v - cy) / fe
    r2 = mx * mx + my * my
    par = model.params

    if isinstance(par, PinholeParams):
        mz = np.ones_like(r2)
        valid = np.ones(r2.shape, dtype=bool)
    elif isinstance(par, EucmParams):
        a, b = par.alpha, par.beta
        disc = 1.0 - (2.0 * a - 1.0) * b * r2
        valid = disc >= 0.0
        disc = np.where(valid, disc, 0.0)
        mz = (1.0 - b * a * a * r2) / (a * np.sqrt(disc) + 1.0 - a)
    else:
        a, xi = par.alpha, par.xi
        disc = 1.0 - (2.0 * a - 1.0) * r2
        valid = disc >= 0.0
        disc = np.where(valid, disc, 0.0)
        mz = (1.0 - a * a * r2) / (a * np.sqrt(disc) + 1.0 - a)
        k = (mz * xi + np.sqrt(mz * mz + (1.0 - xi * xi) * r2)) / (mz * mz + r2 + _EPS)
        d = np.stack([k * mx, k * my, k * mz - xi], axis=-1)
        return normalize(d), valid

    d = np.stack([mx, my, mz], axis=-1)
    return normalize(d), valid


def _half_fov_valid(model: CameraModel, size: ImageSize, theta):
    """True where a horizontal ray at off-axis angle theta lands on a valid
    pixel inside [0, W] x [0, H]."""
    theta = np.asarray(theta, dtype=np.float64)
    d = np.stack([np.sin(theta), np.zeros_like(theta), np.cos(theta)], axis=-1)
    uv, valid = project(model, d)
    u, v = uv[..., 0], uv[..., 1]
    return valid & (u >= 0) & (u <= size.width) & (v >= 0) & (v <= size.height)


def max_half_fov(model: CameraModel, size: ImageSize, grid: int = 2048) -> float:
    """Largest off-axis angle (radians) whose horizontal ray projects to a
    valid in-bounds pixel; found by grid scan plus bisection."""
    thetas = np.linspace(0.0, np.pi - 1e-9, grid)
    ok = _half_fov_valid(model, size, thetas)
    if not ok[0]:
        return 0.0
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        return float(thetas[-1])
    hi_i = bad[0]
    lo, hi = float(thetas[hi_i - 1]), float(thetas[hi_i])
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _half_fov_valid(model, size, mid):
            lo = mid
        else:
            hi = mid
    return lo


def fit_focal_for_fov(template: CameraModel, target_fov: float, size: ImageSize,
                      tol: float = np.deg2rad(0.01)) -> float:
    """Solve for the focal length realizing the target total FoV (radians).

    Distortion parameters and output_scale come from ``template``; its
    focal value is ignored.  Bisection on f against max_half_fov.
    """
    if not 0 < target_fov < 2 * np.pi:
        raise ValidationError(f"target FoV must be in (0, 2*pi), got {target_fov}")
    theta_t = target_fov / 2.0
    if model_is_pinhole(template) and target_fov >= np.pi:
        raise UnachievableFovError(
            f"pinhole cannot reach {np.rad2deg(target_fov):.1f} degrees (must be < 180)"
        )

    f_lo = 1e-3
    if max_half_fov(template.with_focal(f_lo), size) < theta_t - tol:
        raise UnachievableFovError(
            f"{template.family} family cannot reach "
            f"{np.rad2deg(target_fov):.1f} degrees at size {size}"
        )
    f_hi = 1.0
    while max_half_fov(template.with_focal(f_hi), size) > theta_t and f_hi < 1e7:
        f_hi *= 2.0
    for _ in range(100):
        f_mid = 0.5 * (f_lo + f_hi)
        hf = max_half_fov(template.with_focal(f_mid), size)
        if hf > theta_t:
            f_lo = f_mid
        else:
            f_hi = f_mid
        if abs(hf - theta_t) <= tol and f_hi - f_lo < 1e-6 * f_mid:
            break
    f = 0.5 * (f_lo + f_hi)
    if abs(max_half_fov(template.with_focal(f), size) - theta_t) > np.deg2rad(0.05):
        raise UnachievableFovError(
            f"could not fit focal for {np.rad2deg(target_fov):.1f} degrees "
            f"with {template.family} family at size {size}"
        )
    return f


def model_is_pinhole(model: CameraModel) -> bool:
    return isinstance(model.params, PinholeParams)


def image_circle_radius(model: CameraModel) -> float:
    """Radius in pixels of the unprojection validity disk around the
    principal point; inf when every finite radius is valid."""
    par = model.params
    if isinstance(par, PinholeParams):
        return float("inf")
    if isinstance(par, EucmParams):
        k = (2.0 * par.alpha - 1.0) * par.beta
    else:
        k = 2.0 * par.alpha - 1.0
    if k <= 0:
        return float("inf")
    return model.f_eff / np.sqrt(k)
