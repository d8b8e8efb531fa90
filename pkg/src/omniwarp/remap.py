"""Precomputed remap tables: build, compose, apply, and cache on disk.

A table stores, for every destination pixel, fractional source coordinates
(pixel centers at integer positions), an optional cubemap face index, and
a validity mask.  Applying a table is a vectorized gather; tests check it
against a naive per-pixel reference.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CacheError, GeometryMismatchError, ValidationError
from .geometry import (
    ImageSize,
    dir_to_cubeface,
    dir_to_spherical,
    equirect_px_to_dir,
    spherical_to_equirect_px,
)
from .models import CameraModel, max_half_fov, unproject


@dataclass(frozen=True)
class SamplerConfig:
    interpolation: str = "bilinear"  # or "nearest"
    border: str = "black"            # or "clamp"
    seam_wrap: bool = False          # horizontal wrap for equirect sources

    def __post_init__(self):
        if self.interpolation not in ("bilinear", "nearest"):
            raise ValidationError(f"unknown interpolation {self.interpolation!r}")
        if self.border not in ("black", "clamp"):
            raise ValidationError(f"unknown border mode {self.border!r}")


@dataclass
class RemapTable:
    dst_size: ImageSize
    src_size: ImageSize          # face size (square) when face is not None
    coords: np.ndarray           # (H, W, 2) float32, x/y in pixel-center space
    mask: np.ndarray             # (H, W) bool
    face: Optional[np.ndarray] = None  # (H, W) int8 cubemap face index

    def __post_init__(self):
        h, w = self.dst_size.height, self.dst_size.width
        if self.coords.shape != (h, w, 2):
            raise ValidationError(f"coords shape {self.coords.shape} != ({h}, {w}, 2)")
        if self.mask.shape != (h, w):
            raise ValidationError(f"mask shape {self.mask.shape} != ({h}, {w})")
        if self.face is not None and self.face.shape != (h, w):
            raise ValidationError(f"face shape {self.face.shape} != ({h}, {w})")
        self.coords = np.ascontiguousarray(self.coords, dtype=np.float32)
        self.mask = np.ascontiguousarray(self.mask, dtype=bool)
        if self.face is not None:
            self.face = np.ascontiguousarray(self.face, dtype=np.int8)

    def equals(self, other: "RemapTable") -> bool:
        if self.dst_size != other.dst_size or self.src_size != other.src_size:
            return False
        if (self.face is None) != (other.face is None):
            return False
        if not np.array_equal(self.mask, other.mask):
            return False
        if not np.array_equal(self.coords[self.mask], other.coords[other.mask]):
            return False
        if self.face is not None and not np.array_equal(
            self.face[self.mask], other.face[other.mask]
        ):
            return False
        return True


def _dst_grid(dst: ImageSize):
    ys, xs = np.mgrid[0:dst.height, 0:dst.width].astype(np.float64)
    return xs + 0.5, ys + 0.5  # continuous coordinates of pixel centers


def build_equirect_from_cubemap(dst: ImageSize, face_size: int) -> RemapTable:
    """Table mapping an equirect destination onto six cubemap faces."""
    if dst.width != 2 * dst.height:
        raise ValidationError(f"equirect destination must be 2:1, got {dst}")
    if face_size < 1:
        raise ValidationError("face_size must be positive")
    cu, cv = _dst_grid(dst)
    d = equirect_px_to_dir(cu, cv, dst, check=False)
    face, fu, fv = dir_to_cubeface(d)
    coords = np.stack([fu * face_size - 0.5, fv * face_size - 0.5], axis=-1)
    mask = np.ones((dst.height, dst.width), dtype=bool)
    return RemapTable(dst, ImageSize(face_size, face_size),
                      coords.astype(np.float32), mask, face)


def _masked_dirs(model: CameraModel, dst: ImageSize, fov_cap: Optional[float]):
    cu, cv = _dst_grid(dst)
    dirs, valid = unproject(model, cu, cv)
    if fov_cap is not None:
        cap_limit = 2.0 * max_half_fov(model, dst) + np.deg2rad(0.2)
        if fov_cap > cap_limit:
            raise ValidationError(
                f"fov_cap {np.rad2deg(fov_cap):.1f} deg exceeds model capability "
                f"({np.rad2deg(cap_limit):.1f} deg)"
            )
        theta = np.arccos(np.clip(dirs[..., 2], -1.0, 1.0))
        valid = valid & (theta <= fov_cap / 2.0)
    return dirs, valid


def build_fisheye_from_equirect(model: CameraModel, dst: ImageSize, src: ImageSize,
                                fov_cap: Optional[float] = None) -> RemapTable:
    """Table mapping a fisheye destination onto an equirect source."""
    if src.width != 2 * src.height:
        raise ValidationError(f"equirect source must be 2:1, got {src}")
    dirs, valid = _masked_dirs(model, dst, fov_cap)
    lon, lat = dir_to_spherical(dirs)
    u, v = spherical_to_equirect_px(lon, lat, src)
    coords = np.stack([u - 0.5, v - 0.5], axis=-1)
    coords[~valid] = 0.0
    return RemapTable(dst, src, coords.astype(np.float32), valid)


def build_fisheye_from_cubemap(model: CameraModel, dst: ImageSize, face_size: int,
                               fov_cap: Optional[float] = None) -> RemapTable:
    """Fused table mapping a fisheye destination directly onto cubemap faces
    (the exact geometric composition of the two pipeline stages)."""
    dirs, valid = _masked_dirs(model, dst, fov_cap)
    face, fu, fv = dir_to_cubeface(dirs)
    coords = np.stack([fu * face_size - 0.5, fv * face_size - 0.5], axis=-1)
    coords[~valid] = 0.0
    face = np.where(valid, face, 0).astype(np.int8)
    return RemapTable(dst, ImageSize(face_size, face_size),
                      coords.astype(np.float32), valid, face)


def build_identity(size: ImageSize) -> RemapTable:
    ys, xs = np.mgrid[0:size.height, 0:size.width].astype(np.float32)
    coords = np.stack([xs, ys], axis=-1)
    return RemapTable(size, size, coords, np.ones((size.height, size.width), dtype=bool))


def compose(outer: RemapTable, inner: RemapTable, wrap_x: bool = False) -> RemapTable:
    """Fuse two tables: result maps outer's destination onto inner's source.

    Inner coordinates are bilinearly interpolated at outer's sample
    positions; where the 2x2 inner neighborhood crosses a face boundary or
    an invalid entry, the nearest inner entry is used instead.
    """
    if outer.face is not None:
        raise GeometryMismatchError("outer table must have a single-image source")
    if outer.src_size != inner.dst_size:
        raise GeometryMismatchError(
            f"outer source {outer.src_size} != inner destination {inner.dst_size}"
        )
    w, h = inner.dst_size.width, inner.dst_size.height
    x = outer.coords[..., 0].astype(np.float64)
    y = outer.coords[..., 1].astype(np.float64)

    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = x - x0
    fy = y - y0

    def ix(xi):
        return np.mod(xi, w) if wrap_x else np.clip(xi, 0, w - 1)

    def iy(yi):
        return np.clip(yi, 0, h - 1)

    xi0, xi1 = ix(x0), ix(x0 + 1)
    yi0, yi1 = iy(y0), iy(y0 + 1)

    def gather(arr, yi, xi):
        return arr[yi, xi]

    m00 = gather(inner.mask, yi0, xi0)
    m10 = gather(inner.mask, yi0, xi1)
    m01 = gather(inner.mask, yi1, xi0)
    m11 = gather(inner.mask, yi1, xi1)
    all_valid = m00 & m10 & m01 & m11

    interp_ok = all_valid
    if inner.face is not None:
        f00 = gather(inner.face, yi0, xi0)
        same_face = (
            (f00 == gather(inner.face, yi0, xi1))
            & (f00 == gather(inner.face, yi1, xi0))
            & (f00 == gather(inner.face, yi1, xi1))
        )
        interp_ok = interp_ok & same_face

    c00 = gather(inner.coords, yi0, xi0).astype(np.float64)
    c10 = gather(inner.coords, yi0, xi1).astype(np.float64)
    c01 = gather(inner.coords, yi1, xi0).astype(np.float64)
    c11 = gather(inner.coords, yi1, xi1).astype(np.float64)
    w00 = ((1 - fx) * (1 - fy))[..., None]
    w10 = (fx * (1 - fy))[..., None]
    w01 = ((1 - fx) * fy)[..., None]
    w11 = (fx * fy)[..., None]
    interp = w00 * c00 + w10 * c10 + w01 * c01 + w11 * c11

    # nearest fallback for neighborhoods touching invalid entries
    xn = ix(np.floor(x + 0.5).astype(np.int64))
    yn = iy(np.floor(y + 0.5).astype(np.int64))
    near_c = gather(inner.coords, yn, xn).astype(np.float64)
    near_m = gather(inner.mask, yn, xn)

    coords = np.where(interp_ok[..., None], interp, near_c)
    mask = outer.mask & np.where(interp_ok, True, near_m)

    face = None
    if inner.face is not None:
        fn = gather(inner.face, yn, xn)
        face = np.where(interp_ok, f00, fn).astype(np.int8)
        # face-boundary neighborhoods: re-express the four entries on the
        # nearest entry's face plane (gnomonic extension) and interpolate
        seam = mask & all_valid & ~interp_ok
        if np.any(seam):
            from .geometry import cubeface_to_dir, dir_on_face

            s = float(inner.src_size.width)
            fsel = fn[seam].astype(np.int64)
            acc = np.zeros((int(seam.sum()), 2))
            ok_all = np.ones(acc.shape[0], dtype=bool)
            for cN, fN, wN in (
                (c00, gather(inner.face, yi0, xi0), w00),
                (c10, gather(inner.face, yi0, xi1), w10),
                (c01, gather(inner.face, yi1, xi0), w01),
                (c11, gather(inner.face, yi1, xi1), w11),
            ):
                u01 = (cN[seam] + 0.5) / s
                d = cubeface_to_dir(fN[seam].astype(np.int64), u01[:, 0], u01[:, 1])
                uu, vv, ok = dir_on_face(fsel, d)
                ok_all &= ok
                acc += wN[seam] * np.stack([uu * s - 0.5, vv * s - 0.5], axis=-1)
            lifted = np.where(ok_all[:, None], acc, near_c[seam])
            coords[seam] = lifted
    coords[~mask] = 0.0
    if face is not None:
        face[~mask] = 0
    return RemapTable(outer.dst_size, inner.src_size, coords.astype(np.float32), mask, face)


def pad_cubemap(faces: np.ndarray) -> np.ndarray:
    """Surround each face with a one-texel ring resampled from the
    neighboring faces, so bilinear sampling stays continuous across cube
    edges.  Input (6, S, S, C) uint8, output (6, S+2, S+2, C) uint8."""
    from .geometry import cubeface_to_dir, dir_to_cubeface

    six, s, _, ch = faces.shape
    out = np.zeros((6, s + 2, s + 2, ch), dtype=np.uint8)
    out[:, 1:-1, 1:-1] = faces

    # ring texel centers in extended face coordinates
    idx = np.arange(-1, s + 1)
    ring_i = np.concatenate([
        np.stack([np.full(s + 2, -1), idx], axis=1),      # top row
        np.stack([np.full(s + 2, s), idx], axis=1),       # bottom row
        np.stack([idx, np.full(s + 2, -1)], axis=1),      # left col
        np.stack([idx, np.full(s + 2, s)], axis=1),       # right col
    ])
    u01 = (ring_i[:, 1] + 0.5) / s
    v01 = (ring_i[:, 0] + 0.5) / s
    for f in range(6):
        d = cubeface_to_dir(np.full(len(u01), f), u01, v01)
        nf, nu, nv = dir_to_cubeface(d)
        x = nu * s - 0.5
        y = nv * s - 0.5
        x0 = np.clip(np.floor(x).astype(np.int64), 0, s - 2)
        y0 = np.clip(np.floor(y).astype(np.int64), 0, s - 2)
        fx = np.clip(x - x0, 0.0, 1.0)[:, None]
        fy = np.clip(y - y0, 0.0, 1.0)[:, None]
        nf = nf.astype(np.int64)
        val = ((1 - fx) * (1 - fy) * faces[nf, y0, x0]
               + fx * (1 - fy) * faces[nf, y0, x0 + 1]
               + (1 - fx) * fy * faces[nf, y0 + 1, x0]
               + fx * fy * faces[nf, y0 + 1, x0 + 1])
        out[f, ring_i[:, 0] + 1, ring_i[:, 1] + 1] = np.clip(
            np.floor(val + 0.5), 0, 255).astype(np.uint8)
    return out


def apply(table: RemapTable, src, cfg: SamplerConfig = SamplerConfig()):
    """Apply a remap table to a source image (or stacked cubemap faces).

    ``src`` is (H, W, C) uint8, or (6, S, S, C) uint8 for cubemap tables.
    Masked pixels come out black.
    """
    src = np.asarray(src)
    if src.dtype != np.uint8:
        raise ValidationError("source image must be uint8")
    if table.face is not None:
        if src.ndim != 4 or src.shape[0] != 6:
            raise ValidationError("cubemap table needs a (6, S, S, C) source")
        if src.shape[1] != table.src_size.height or src.shape[2] != table.src_size.width:
            raise GeometryMismatchError(
                f"face size {src.shape[2]}x{src.shape[1]} != table source {table.src_size}"
            )
        # pad with one texel from the neighboring faces so sampling stays
        # continuous across cube edges, and clamp within the padded face
        faces = pad_cubemap(src)
        sh, sw, ch = faces.shape[1], faces.shape[2], faces.shape[3]
        flat = faces.reshape(6 * sh * sw, ch)
        base = table.face.astype(np.int64) * (sh * sw)
        wrap = False  # faces never wrap
        cfg = SamplerConfig(cfg.interpolation, "clamp", False)
        pad = 1.0
    else:
        if src.ndim != 3:
            raise ValidationError("expected (H, W, C) source image")
        if src.shape[0] != table.src_size.height or src.shape[1] != table.src_size.width:
            raise GeometryMismatchError(
                f"source {src.shape[1]}x{src.shape[0]} != table source {table.src_size}"
            )
        sh, sw, ch = src.shape
        flat = src.reshape(sh * sw, ch)
        base = 0
        wrap = cfg.seam_wrap
        pad = 0.0

    x = table.coords[..., 0].astype(np.float64) + pad
    y = table.coords[..., 1].astype(np.float64) + pad

    def ix(xi):
        return np.mod(xi, sw) if wrap else np.clip(xi, 0, sw - 1)

    def inb_x(xi):
        return np.ones(xi.shape, dtype=bool) if wrap else (xi >= 0) & (xi < sw)

    out = np.zeros((table.dst_size.height, table.dst_size.width, flat.shape[1]),
                   dtype=np.uint8)

    if cfg.interpolation == "nearest":
        xi = np.floor(x + 0.5).astype(np.int64)
        yi = np.floor(y + 0.5).astype(np.int64)
        inb = inb_x(xi) & (yi >= 0) & (yi < sh)
        xi = ix(xi)
        yi = np.clip(yi, 0, sh - 1)
        vals = flat[base + yi * sw + xi]
        if cfg.border == "black":
            vals = np.where((table.mask & inb)[..., None], vals, 0)
        else:
            vals = np.where(table.mask[..., None], vals, 0)
        out[...] = vals
        return out

    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = (x - x0)[..., None]
    fy = (y - y0)[..., None]

    acc = np.zeros(out.shape, dtype=np.float64)
    for dy, wy in ((0, 1.0 - fy), (1, fy)):
        yi = y0 + dy
        in_y = (yi >= 0) & (yi < sh)
        yc = np.clip(yi, 0, sh - 1)
        for dx, wx in ((0, 1.0 - fx), (1, fx)):
            xi = x0 + dx
            in_xy = inb_x(xi) & in_y
            xc = ix(xi)
            vals = flat[base + yc * sw + xc].astype(np.float64)
            if cfg.border == "black":
                vals = np.where(in_xy[..., None], vals, 0.0)
            acc += wx * wy * vals
    res = np.clip(np.floor(acc + 0.5), 0, 255).astype(np.uint8)
    res[~table.mask] = 0
    out[...] = res
    return out


# ---------------------------------------------------------------------------
# on-disk cache


MAGIC = b"OWRT"
FORMAT_VERSION = 1


def cache_key(**inputs) -> str:
    """Stable identifier for the inputs that determine a table."""
    payload = {"format_version": FORMAT_VERSION}
    for k, v in inputs.items():
        if isinstance(v, ImageSize):
            v = [v.width, v.height]
        elif isinstance(v, CameraModel):
            v = {"family": v.family, "output_scale": v.output_scale,
                 **{f: getattr(v.params, f) for f in v.params.__dataclass_fields__}}
        payload[k] = v
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=repr)
    return hashlib.sha256(blob.encode()).hexdigest()[:32]


def save_table(table: RemapTable, path):
    """Write a table as a little-endian container with trailing checksum."""
    has_face = table.face is not None
    header = MAGIC + struct.pack(
        "<IIIIII",
        FORMAT_VERSION,
        1 if has_face else 0,
        table.dst_size.width,
        table.dst_size.height,
        table.src_size.width,
        table.src_size.height,
    )
    body = [header,
            table.coords.astype("<f4").tobytes(),
            np.packbits(table.mask).tobytes()]
    if has_face:
        body.append(table.face.astype(np.int8).tobytes())
    blob = b"".join(body)
    blob += hashlib.sha256(blob).digest()
    path = os.fspath(path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_table(path) -> RemapTable:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as e:
        raise CacheError(f"cannot read cache file {path}: {e}") from e
    if len(blob) < 28 + 32 or blob[:4] != MAGIC:
        raise CacheError(f"not a remap-table cache file: {path}")
    if hashlib.sha256(blob[:-32]).digest() != blob[-32:]:
        raise CacheError(f"cache checksum mismatch: {path}")
    version, has_face, dw, dh, sw, sh = struct.unpack("<IIIIII", blob[4:28])
    if version != FORMAT_VERSION:
        raise CacheError(f"unsupported cache version {version}: {path}")
    try:
        off = 28
        n = dw * dh
        coords = np.frombuffer(blob, dtype="<f4", count=2 * n, offset=off)
        coords = coords.reshape(dh, dw, 2).astype(np.float32)
        off += 8 * n
        nmask = (n + 7) // 8
        mask = np.unpackbits(
            np.frombuffer(blob, dtype=np.uint8, count=nmask, offset=off)
        )[:n].reshape(dh, dw).astype(bool)
        off += nmask
        face = None
        if has_face:
            face = np.frombuffer(blob, dtype=np.int8, count=n, offset=off)
            face = face.reshape(dh, dw).copy()
        return RemapTable(ImageSize(dw, dh), ImageSize(sw, sh), coords, mask, face)
    except (ValueError, ValidationError) as e:
        raise CacheError(f"malformed cache file {path}: {e}") from e


@dataclass
class TableCache:
    """Directory-backed table cache; corrupt entries trigger a rebuild."""

    directory: str
    last_hit: bool = field(default=False, init=False)

    def path_for(self, key: str) -> str:
        return os.path.join(self.directory, key + ".owrt")

    def get(self, key: str, builder: Callable[[], RemapTable]) -> RemapTable:
        path = self.path_for(key)
        if os.path.exists(path):
            try:
                table = load_table(path)
                self.last_hit = True
                return table
            except CacheError:
                pass
        table = builder()
        save_table(table, path)
        self.last_hit = False
        return table
