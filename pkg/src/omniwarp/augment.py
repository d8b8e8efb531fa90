"""Scale augmentation: random scale draws, the fixed-crop baseline, and
deterministic sweep grids.

center_scale(s <= 1) crops the centered round(s*W) x round(s*H) window and
resizes to the target; s > 1 zooms out, shrinking the image onto a black
canvas with symmetric borders of fractional width (1 - 1/s)/2 per side.
Window sizes round half up, offsets floor.  Resampling is bilinear (no
antialias), shared with the remap engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .geometry import ImageSize
from .remap import RemapTable, SamplerConfig, apply

DEFAULT_SCALE_RANGE = (0.7, 1.3)
DEFAULT_SWEEP_SCALES = (0.70, 0.85, 1.00, 1.15, 1.30)


@dataclass(frozen=True)
class RsaConfig:
    s_lo: float = DEFAULT_SCALE_RANGE[0]
    s_hi: float = DEFAULT_SCALE_RANGE[1]
    target: ImageSize = ImageSize(128, 128)
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.s_lo <= self.s_hi:
            raise ValidationError(
                f"scale bounds must satisfy 0 < s_lo <= s_hi, got ({self.s_lo}, {self.s_hi})")


@dataclass(frozen=True)
class SweepSpec:
    scales: Tuple[float, ...] = DEFAULT_SWEEP_SCALES
    target: ImageSize = ImageSize(128, 128)

    def __post_init__(self):
        if len(self.scales) == 0:
            raise ValidationError("sweep needs at least one scale")
        if any(s <= 0 for s in self.scales):
            raise ValidationError(f"sweep scales must be positive, got {self.scales}")
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def resize_bilinear(img: np.ndarray, target: ImageSize) -> np.ndarray:
    """Bilinear resize via an affine remap table (pixel centers aligned)."""
    sh, sw = img.shape[0], img.shape[1]
    if (sw, sh) == (target.width, target.height):
        return img.copy()
    ys, xs = np.mgrid[0:target.height, 0:target.width].astype(np.float64)
    coords = np.stack([(xs + 0.5) * (sw / target.width) - 0.5,
                       (ys + 0.5) * (sh / target.height) - 0.5], axis=-1)
    table = RemapTable(target, ImageSize(sw, sh), coords.astype(np.float32),
                       np.ones((target.height, target.width), dtype=bool))
    return apply(table, img, SamplerConfig(border="clamp"))


def center_scale(img: np.ndarray, s: float, target: ImageSize) -> np.ndarray:
    """Center-crop (s <= 1) or zoom out onto black (s > 1), then hit target size."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValidationError(f"expected non-empty (H, W, C) image, got shape {img.shape}")
    if not s > 0:
        raise ValidationError(f"scale must be positive, got {s}")
    h, w = img.shape[0], img.shape[1]
    if s <= 1.0:
        cw = _round_half_up(s * w)
        ch = _round_half_up(s * h)
        if cw < 1 or ch < 1:
            raise ValidationError(f"scale {s} degenerates a {w}x{h} image")
        x0 = (w - cw) // 2
        y0 = (h - ch) // 2
        return resize_bilinear(img[y0:y0 + ch, x0:x0 + cw], target)
    iw = _round_half_up(target.width / s)
    ih = _round_half_up(target.height / s)
    if iw < 1 or ih < 1:
        raise ValidationError(f"scale {s} degenerates the {target} target")
    inner = resize_bilinear(img, ImageSize(iw, ih))
    out = np.zeros((target.height, target.width, img.shape[2]), dtype=np.uint8)
    x0 = (target.width - iw) // 2
    y0 = (target.height - ih) // 2
    out[y0:y0 + ih, x0:x0 + iw] = inner
    return out


def rsa_apply(img: np.ndarray, cfg: RsaConfig,
              rng: np.random.Generator) -> Tuple[np.ndarray, float]:
    """Draw s ~ U(s_lo, s_hi) from the stream and center-scale; returns (image, s)."""
    s = float(rng.uniform(cfg.s_lo, cfg.s_hi))
    return center_scale(img, s, cfg.target), s


def rsa_stream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent per-worker/per-file RNG stream derived from (seed, index)."""
    return np.random.default_rng([seed, index])


def fixed_crop(img: np.ndarray, scale: float, target: ImageSize) -> np.ndarray:
    """Fixed-scale center crop baseline; never zooms out."""
    if not 0 < scale <= 1.0:
        raise ValidationError(f"fixed crop scale must be in (0, 1], got {scale}")
    return center_scale(img, scale, target)


def scale_sweep(img: np.ndarray, spec: SweepSpec) -> list:
    """One center_scale render per sweep scale, in order."""
    return [center_scale(img, s, spec.target) for s in spec.scales]
