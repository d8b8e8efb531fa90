"""Shared fixtures and independent reference implementations (oracles).

The naive samplers here are deliberately scalar double loops, written from
the sampling definition and kept independent of the vectorized fast path.
"""

import numpy as np
import pytest

from omniwarp.geometry import CubeFace, ImageSize
from omniwarp.pipeline import CubemapFaces


def naive_apply(table, src, cfg):
    """Scalar per-pixel reference for remap application."""
    src = np.asarray(src)
    if table.face is not None:
        # faces are pre-padded with a neighbor ring (shared preprocessing);
        # the sampling loop itself stays an independent reference
        from omniwarp.remap import SamplerConfig, pad_cubemap
        src = pad_cubemap(src)
        sh, sw, ch = src.shape[1], src.shape[2], src.shape[3]
        wrap = False
        cfg = SamplerConfig(cfg.interpolation, "clamp", False)
        pad = 1.0
    else:
        sh, sw, ch = src.shape
        wrap = cfg.seam_wrap
        pad = 0.0
    H, W = table.dst_size.height, table.dst_size.width
    out = np.zeros((H, W, ch), dtype=np.uint8)

    def fetch(fi, yi, xi):
        if wrap:
            xi = xi % sw
        in_b = (0 <= xi < sw) and (0 <= yi < sh)
        if not in_b:
            if cfg.border == "black":
                return np.zeros(ch, dtype=np.float64), False
            xi = min(max(xi, 0), sw - 1)
            yi = min(max(yi, 0), sh - 1)
        if table.face is not None:
            return src[fi, yi, xi].astype(np.float64), True
        return src[yi, xi].astype(np.float64), True

    for j in range(H):
        for i in range(W):
            if not table.mask[j, i]:
                continue
            x = float(table.coords[j, i, 0]) + pad
            y = float(table.coords[j, i, 1]) + pad
            fi = int(table.face[j, i]) if table.face is not None else 0
            if cfg.interpolation == "nearest":
                xi = int(np.floor(x + 0.5))
                yi = int(np.floor(y + 0.5))
                val, inb = fetch(fi, yi, xi)
                if inb or cfg.border == "clamp":
                    out[j, i] = val.astype(np.uint8)
                continue
            x0 = int(np.floor(x))
            y0 = int(np.floor(y))
            fx, fy = x - x0, y - y0
            acc = np.zeros(ch, dtype=np.float64)
            for dy, wy in ((0, 1 - fy), (1, fy)):
                for dx, wx in ((0, 1 - fx), (1, fx)):
                    val, _ = fetch(fi, y0 + dy, x0 + dx)
                    acc += wx * wy * val
            out[j, i] = np.clip(np.floor(acc + 0.5), 0, 255).astype(np.uint8)
    return out


def random_unit_dirs(rng, n):
    d = rng.normal(size=(n, 3))
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def solid_faces(face_size=32, channels=3):
    """Cubemap with a distinct solid color per face."""
    colors = {
        CubeFace.FRONT: (255, 0, 0),
        CubeFace.BACK: (0, 255, 0),
        CubeFace.RIGHT: (0, 0, 255),
        CubeFace.LEFT: (255, 255, 0),
        CubeFace.UP: (255, 0, 255),
        CubeFace.DOWN: (0, 255, 255),
    }
    faces = {}
    for f, c in colors.items():
        img = np.zeros((face_size, face_size, channels), dtype=np.uint8)
        img[..., :3] = c
        if channels == 4:
            img[..., 3] = 255
        faces[f] = img
    return CubemapFaces(faces), colors


def smooth_faces(face_size=64, seed=0):
    """Cubemap faces sampled from a smooth function on the sphere, so the
    assembled cubemap is continuous across face boundaries (needed for
    LSB-level path-equivalence comparisons)."""
    from omniwarp.geometry import cubeface_to_dir

    rng = np.random.default_rng(seed)
    w = rng.normal(size=(3, 3))  # one direction-frequency per channel
    ph = rng.uniform(0, 2 * np.pi, size=3)
    faces = {}
    ys, xs = (np.mgrid[0:face_size, 0:face_size] + 0.5) / face_size
    for f in CubeFace:
        d = cubeface_to_dir(np.full(xs.shape, int(f)), xs, ys)
        img = np.zeros((face_size, face_size, 3))
        for c in range(3):
            img[..., c] = 128 + 100 * np.sin(2.5 * d @ w[c] + ph[c])
        faces[f] = np.clip(img, 0, 255).astype(np.uint8)
    return CubemapFaces(faces)


def random_faces(face_size=32, seed=0):
    rng = np.random.default_rng(seed)
    return CubemapFaces({
        f: rng.integers(0, 256, size=(face_size, face_size, 3), dtype=np.uint8)
        for f in CubeFace
    })


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
