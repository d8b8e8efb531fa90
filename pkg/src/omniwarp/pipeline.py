"""User-facing renders: six pinhole faces in, panoramas and fisheye out.

Images are (H, W, C) uint8 numpy arrays, C in {3, 4}.  Cubemap directories
follow the naming convention front.png, back.png, left.png, right.png,
up.png, down.png, overridable via a manifest.json mapping face names to
filenames.
"""

from __future__ import annotations

import os
import json
import tempfile
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from PIL import Image

from .errors import ValidationError
from .geometry import CubeFace, ImageSize
from .models import CameraModel, PinholeParams, fit_focal_for_fov
from .remap import (
    RemapTable,
    SamplerConfig,
    TableCache,
    apply,
    build_equirect_from_cubemap,
    build_fisheye_from_cubemap,
    build_fisheye_from_equirect,
    cache_key,
)

FACE_FILE_NAMES = {
    CubeFace.FRONT: "front.png",
    CubeFace.BACK: "back.png",
    CubeFace.RIGHT: "right.png",
    CubeFace.LEFT: "left.png",
    CubeFace.UP: "up.png",
    CubeFace.DOWN: "down.png",
}

DEFAULT_EQUIRECT_FACTOR = 4  # intermediate panorama width = 4 x fisheye width


@dataclass
class CubemapFaces:
    """Six equally sized square 8-bit faces keyed by CubeFace."""

    faces: Dict[CubeFace, np.ndarray]

    def __post_init__(self):
        missing = [f.name.lower() for f in CubeFace if f not in self.faces]
        if missing:
            raise ValidationError(f"missing cubemap faces: {', '.join(missing)}")
        shapes = {self.faces[f].shape for f in CubeFace}
        if len(shapes) != 1:
            raise ValidationError(f"cubemap faces differ in shape: {sorted(shapes)}")
        shape = shapes.pop()
        if len(shape) != 3 or shape[0] != shape[1] or shape[2] not in (3, 4):
            raise ValidationError(f"faces must be square (S, S, 3|4), got {shape}")
        for f in CubeFace:
            if self.faces[f].dtype != np.uint8:
                raise ValidationError(f"face {f.name.lower()} must be uint8")

    @property
    def face_size(self) -> int:
        return self.faces[CubeFace.FRONT].shape[0]

    @property
    def channels(self) -> int:
        return self.faces[CubeFace.FRONT].shape[2]

    def as_array(self) -> np.ndarray:
        """Faces stacked (6, S, S, C) in CubeFace enum order."""
        return np.stack([self.faces[f] for f in CubeFace])


def read_png(path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode not in ("RGB", "RGBA"):
            im = im.convert("RGB")
        return np.asarray(im, dtype=np.uint8)


def write_png(img: np.ndarray, path) -> None:
    """Atomic PNG write (temp file then rename)."""
    img = np.asarray(img, dtype=np.uint8)
    mode = {3: "RGB", 4: "RGBA"}.get(img.shape[2] if img.ndim == 3 else 0)
    if mode is None:
        raise ValidationError(f"cannot write image of shape {img.shape} as PNG")
    path = os.fspath(path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".png.tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            Image.fromarray(img, mode).save(fh, format="PNG")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_cubemap_dir(directory) -> CubemapFaces:
    """Load six faces from a directory, honoring an optional manifest.json."""
    directory = os.fspath(directory)
    names = dict(FACE_FILE_NAMES)
    manifest = os.path.join(directory, "manifest.json")
    if os.path.exists(manifest):
        with open(manifest) as fh:
            mapping = json.load(fh)
        by_name = {f.name.lower(): f for f in CubeFace}
        for key, fname in mapping.items():
            if key not in by_name:
                raise ValidationError(f"manifest.json names unknown face {key!r}")
            names[by_name[key]] = fname
    faces = {}
    for face, fname in names.items():
        path = os.path.join(directory, fname)
        if not os.path.exists(path):
            raise FileNotFoundError(
                f"missing cubemap face {face.name.lower()!r}: {path}")
        faces[face] = read_png(path)
    return CubemapFaces(faces)


def _cached(cache: Optional[TableCache], key: str, builder):
    if cache is None:
        return builder()
    return cache.get(key, builder)


def cubemap_to_equirect(faces: CubemapFaces, dst: ImageSize,
                        cfg: SamplerConfig = SamplerConfig(),
                        cache: Optional[TableCache] = None) -> np.ndarray:
    """Stitch six faces into a 2:1 panorama."""
    key = cache_key(op="equirect_from_cubemap", dst=dst, face_size=faces.face_size)
    table = _cached(cache, key,
                    lambda: build_equirect_from_cubemap(dst, faces.face_size))
    return apply(table, faces.as_array(), cfg)


def equirect_to_fisheye(pano: np.ndarray, model: CameraModel, dst: ImageSize,
                        cfg: SamplerConfig = SamplerConfig(seam_wrap=True),
                        fov_cap: Optional[float] = None,
                        cache: Optional[TableCache] = None) -> np.ndarray:
    """Second pipeline stage: panorama -> fisheye via a projection model."""
    src = ImageSize(pano.shape[1], pano.shape[0])
    key = cache_key(op="fisheye_from_equirect", model=model, dst=dst, src=src,
                    fov_cap=fov_cap)
    table = _cached(cache, key,
                    lambda: build_fisheye_from_equirect(model, dst, src, fov_cap))
    return apply(table, pano, cfg)


def render_fisheye(faces: CubemapFaces, model: CameraModel, dst: ImageSize,
                   cfg: SamplerConfig = SamplerConfig(),
                   fov_cap: Optional[float] = None,
                   cache: Optional[TableCache] = None) -> np.ndarray:
    """One-stage fisheye render through a fused cubemap->fisheye table."""
    key = cache_key(op="fisheye_from_cubemap", model=model, dst=dst,
                    face_size=faces.face_size, fov_cap=fov_cap)
    table = _cached(
        cache, key,
        lambda: build_fisheye_from_cubemap(model, dst, faces.face_size, fov_cap))
    return apply(table, faces.as_array(), cfg)


def render_fisheye_two_stage(faces: CubemapFaces, model: CameraModel, dst: ImageSize,
                             cfg: SamplerConfig = SamplerConfig(),
                             fov_cap: Optional[float] = None,
                             equirect_width: Optional[int] = None,
                             cache: Optional[TableCache] = None) -> np.ndarray:
    """Explicit two-stage render materializing the intermediate panorama."""
    if equirect_width is None:
        equirect_width = DEFAULT_EQUIRECT_FACTOR * dst.width
    pano_size = ImageSize(equirect_width, equirect_width // 2)
    pano = cubemap_to_equirect(faces, pano_size, cfg, cache)
    stage2 = SamplerConfig(cfg.interpolation, cfg.border, seam_wrap=True)
    return equirect_to_fisheye(pano, model, dst, stage2, fov_cap, cache)


def pinhole_model_for_fov(fov: float, dst: ImageSize) -> CameraModel:
    template = CameraModel(PinholeParams(1.0, dst.width / 2.0, dst.height / 2.0))
    f = fit_focal_for_fov(template, fov, dst)
    return template.with_focal(f)


def render_pinhole(faces: CubemapFaces, fov: float, dst: ImageSize,
                   cfg: SamplerConfig = SamplerConfig(),
                   cache: Optional[TableCache] = None) -> np.ndarray:
    """Control-group pinhole render through the same fused pipeline."""
    model = pinhole_model_for_fov(fov, dst)
    return render_fisheye(faces, model, dst, cfg, fov_cap=None, cache=cache)
