"""Conversions among 3D ray directions, spherical angles, equirectangular
pixels, and cubemap face coordinates.

Frozen conventions (every other module consumes these, none redefines them):

* Camera frame: ``+z`` forward along the optical axis, ``+x`` right,
  ``+y`` down (matches image row/column growth).
* Longitude ``lon = atan2(x, z)`` in ``[-pi, pi)``; 0 is forward,
  ``+pi/2`` is right.  Latitude ``lat = asin(-y)`` in ``[-pi/2, pi/2]``;
  ``+pi/2`` is up.  At the poles longitude is canonicalized to 0.
* Equirectangular pixels: ``u = (lon/(2*pi) + 0.5) * width``,
  ``v = (0.5 - lat/pi) * height``; longitude spans the width left to
  right, row 0 is the up pole.
* Cube faces: FRONT=+z, BACK=-z, RIGHT=+x, LEFT=-x, UP=-y, DOWN=+y.
  Each face is the image of a 90-degree pinhole camera; the per-face
  (forward, right, down) axes are listed in ``FACE_BASES`` below.

All functions are pure and vectorized over leading array dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class ImageSize:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError(f"image size must be positive, got {self.width}x{self.height}")

    def __str__(self):
        return f"{self.width}x{self.height}"


class CubeFace(IntEnum):
    FRONT = 0  # +z
    BACK = 1   # -z
    RIGHT = 2  # +x
    LEFT = 3   # -x
    UP = 4     # -y
    DOWN = 5   # +y


# Per-face orthonormal basis, rows = (forward, right, down) in the camera
# frame.  A face-local point (u, v) in [0,1]^2 maps to the direction
# forward + (2u-1)*right + (2v-1)*down.  This table is the single source
# of truth for cube orientation.
FACE_BASES = np.array(
    [
        # forward        right          down
        [[0, 0, 1], [1, 0, 0], [0, 1, 0]],    # FRONT  (+z)
        [[0, 0, -1], [-1, 0, 0], [0, 1, 0]],  # BACK   (-z)
        [[1, 0, 0], [0, 0, -1], [0, 1, 0]],   # RIGHT  (+x)
        [[-1, 0, 0], [0, 0, 1], [0, 1, 0]],   # LEFT   (-x)
        [[0, -1, 0], [1, 0, 0], [0, 0, 1]],   # UP     (-y)
        [[0, 1, 0], [1, 0, 0], [0, 0, -1]],   # DOWN   (+y)
    ],
    dtype=np.float64,
)

TWO_PI = 2.0 * np.pi


def normalize(d):
    """Return d scaled to unit length along the last axis."""
    d = np.asarray(d, dtype=np.float64)
    n = np.linalg.norm(d, axis=-1, keepdims=True)
    return d / n


def dir_to_spherical(d):
    """Unit direction -> (lon, lat).  Poles get lon = 0 (atan2(0,0))."""
    d = np.asarray(d, dtype=np.float64)
    lon = np.arctan2(d[..., 0], d[..., 2])
    lat = np.arcsin(np.clip(-d[..., 1], -1.0, 1.0))
    # atan2 returns (-pi, pi]; fold the +pi seam onto -pi so lon < pi.
    lon = np.where(lon >= np.pi, -np.pi, lon)
    return lon, lat


def spherical_to_dir(lon, lat):
    """(lon, lat) -> unit direction (cos lat sin lon, -sin lat, cos lat cos lon)."""
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    cl = np.cos(lat)
    return np.stack([cl * np.sin(lon), -np.sin(lat), cl * np.cos(lon)], axis=-1)


def spherical_to_equirect_px(lon, lat, size: ImageSize):
    """Angles -> fractional equirect pixel coordinates (u in [0,W), v in [0,H])."""
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    u = (lon / TWO_PI + 0.5) * size.width
    # guard the seam: lon == pi - eps can round up to exactly W
    u = np.where(u >= size.width, u - size.width, u)
    v = (0.5 - lat / np.pi) * size.height
    return u, v


def equirect_px_to_dir(u, v, size: ImageSize, check: bool = True):
    """Fractional equirect pixel -> unit direction.  Inverse of the forward map."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if check:
        if np.any(u < 0) or np.any(u >= size.width) or np.any(v < 0) or np.any(v > size.height):
            raise ValidationError(f"equirect pixel out of range for {size}")
    lon = (u / size.width - 0.5) * TWO_PI
    lat = (0.5 - v / size.height) * np.pi
    return spherical_to_dir(lon, lat)


def dir_to_cubeface(d):
    """Unit direction -> (face index, u, v) with u, v in [0, 1].

    Face = signed axis with the largest absolute component; ties broken by
    the fixed priority +x, -x, +y, -y, +z, -z.
    """
    d = np.asarray(d, dtype=np.float64)
    x, y, z = d[..., 0], d[..., 1], d[..., 2]
    ax, ay, az = np.abs(x), np.abs(y), np.abs(z)
    # priority x >= y >= z realizes the stated tie-break order
    use_x = (ax >= ay) & (ax >= az)
    use_y = ~use_x & (ay >= az)
    use_z = ~use_x & ~use_y

    face = np.empty(np.shape(x), dtype=np.int8)
    face[...] = np.where(use_x, np.where(x >= 0, CubeFace.RIGHT, CubeFace.LEFT), 0)
    face[use_y] = np.where(y[use_y] >= 0, CubeFace.DOWN, CubeFace.UP)
    face[use_z] = np.where(z[use_z] >= 0, CubeFace.FRONT, CubeFace.BACK)

    bases = FACE_BASES[face]
    fwd = np.einsum("...i,...i->...", d, bases[..., 0, :])
    a = np.einsum("...i,...i->...", d, bases[..., 1, :]) / fwd
    b = np.einsum("...i,...i->...", d, bases[..., 2, :]) / fwd
    u = np.clip((a + 1.0) * 0.5, 0.0, 1.0)
    v = np.clip((b + 1.0) * 0.5, 0.0, 1.0)
    return face, u, v


def dir_on_face(face, d):
    """Project directions onto a prescribed face plane without clamping.

    Returns (u, v, ok); u, v may fall outside [0, 1] (gnomonic extension),
    ok is False where the direction points away from the face hemisphere.
    """
    face = np.asarray(face, dtype=np.int64)
    d = np.asarray(d, dtype=np.float64)
    bases = FACE_BASES[face]
    fwd = np.einsum("...i,...i->...", d, bases[..., 0, :])
    ok = fwd > 1e-9
    safe = np.where(ok, fwd, 1.0)
    a = np.einsum("...i,...i->...", d, bases[..., 1, :]) / safe
    b = np.einsum("...i,...i->...", d, bases[..., 2, :]) / safe
    return (a + 1.0) * 0.5, (b + 1.0) * 0.5, ok


def cubeface_to_dir(face, u, v):
    """(face, u, v) -> unit direction; inverse of dir_to_cubeface off ties."""
    face = np.asarray(face, dtype=np.int64)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    bases = FACE_BASES[face]
    a = (2.0 * u - 1.0)[..., None]
    b = (2.0 * v - 1.0)[..., None]
    d = bases[..., 0, :] + a * bases[..., 1, :] + b * bases[..., 2, :]
    return normalize(d)
