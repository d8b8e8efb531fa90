import json

import numpy as np
import pytest

from omniwarp.errors import UnachievableFovError, ValidationError
from omniwarp.geometry import CubeFace, ImageSize
from omniwarp.models import CameraModel, EucmParams
from omniwarp.pipeline import (
    CubemapFaces,
    cubemap_to_equirect,
    equirect_to_fisheye,
    load_cubemap_dir,
    read_png,
    render_fisheye,
    render_fisheye_two_stage,
    render_pinhole,
    write_png,
)
from omniwarp.presets import get_preset
from omniwarp.remap import SamplerConfig
from conftest import random_faces, smooth_faces, solid_faces

SEEN = CameraModel(EucmParams(45, 0.4, 2.0, 64, 64), output_scale=0.9)

YAW_PERM = {  # front -> right -> back -> left -> front, poles rotate in plane
    CubeFace.FRONT: CubeFace.RIGHT,
    CubeFace.RIGHT: CubeFace.BACK,
    CubeFace.BACK: CubeFace.LEFT,
    CubeFace.LEFT: CubeFace.FRONT,
}


def yaw_faces(faces: CubemapFaces) -> CubemapFaces:
    """Rotate the whole cubemap 90 degrees about the vertical axis."""
    new = {dst: faces.faces[src] for dst, src in YAW_PERM.items()}
    new[CubeFace.UP] = np.rot90(faces.faces[CubeFace.UP], -1)
    new[CubeFace.DOWN] = np.rot90(faces.faces[CubeFace.DOWN], 1)
    return CubemapFaces(new)


class TestCubemapFaces:
    def test_missing_face_rejected(self):
        faces, _ = solid_faces(16)
        d = dict(faces.faces)
        del d[CubeFace.BACK]
        with pytest.raises(ValidationError, match="back"):
            CubemapFaces(d)

    def test_mismatched_sizes_rejected(self):
        faces, _ = solid_faces(16)
        d = dict(faces.faces)
        d[CubeFace.UP] = np.zeros((8, 8, 3), dtype=np.uint8)
        with pytest.raises(ValidationError):
            CubemapFaces(d)

    def test_load_dir_and_manifest(self, tmp_path):
        faces, _ = solid_faces(8)
        names = {"front": "front.png", "back": "back.png", "left": "left.png",
                 "right": "right.png", "up": "top.png", "down": "bottom.png"}
        for face in CubeFace:
            write_png(faces.faces[face], tmp_path / names[face.name.lower()])
        (tmp_path / "manifest.json").write_text(
            json.dumps({"up": "top.png", "down": "bottom.png"}))
        loaded = load_cubemap_dir(tmp_path)
        for face in CubeFace:
            assert np.array_equal(loaded.faces[face], faces.faces[face])

    def test_missing_face_file_names_face(self, tmp_path):
        faces, _ = solid_faces(8)
        for face in CubeFace:
            if face != CubeFace.LEFT:
                write_png(faces.faces[face], tmp_path / f"{face.name.lower()}.png")
        with pytest.raises(FileNotFoundError, match="left"):
            load_cubemap_dir(tmp_path)


class TestPanorama:
    def test_aspect_enforced(self):
        faces, _ = solid_faces(16)
        with pytest.raises(ValidationError):
            cubemap_to_equirect(faces, ImageSize(100, 60))

    def test_solid_faces_colors(self):
        faces, colors = solid_faces(32)
        pano = cubemap_to_equirect(faces, ImageSize(256, 128),
                                   SamplerConfig("nearest"))
        present = {tuple(c) for c in pano.reshape(-1, 3)}
        assert present == {tuple(v) for v in colors.values()}
        assert tuple(pano[64, 128]) == colors[CubeFace.FRONT]

    def test_idempotent(self):
        faces = random_faces(16, seed=9)
        a = cubemap_to_equirect(faces, ImageSize(128, 64))
        b = cubemap_to_equirect(faces, ImageSize(128, 64))
        assert np.array_equal(a, b)

    def test_yaw_equivariance_nearest(self):
        faces = random_faces(32, seed=4)
        size = ImageSize(256, 128)
        cfg = SamplerConfig("nearest")
        pano = cubemap_to_equirect(faces, size, cfg)
        pano_rot = cubemap_to_equirect(yaw_faces(faces), size, cfg)
        assert np.array_equal(pano_rot, np.roll(pano, -size.width // 4, axis=1))


class TestFisheye:
    def test_fused_equals_two_stage_within_lsb(self):
        faces = smooth_faces(64, seed=2)
        one = render_fisheye(faces, SEEN, ImageSize(128, 128))
        two = render_fisheye_two_stage(faces, SEEN, ImageSize(128, 128))
        assert np.abs(one.astype(int) - two.astype(int)).max() <= 1

    def test_constant_panorama_gives_disk_on_black(self):
        pano = np.full((128, 256, 3), 180, dtype=np.uint8)
        out = equirect_to_fisheye(pano, SEEN, ImageSize(96, 96))
        vals = {tuple(c) for c in out.reshape(-1, 3)}
        assert vals <= {(180, 180, 180), (0, 0, 0)}
        assert tuple(out[48, 48]) == (180, 180, 180)

    def test_center_pixel_equals_pano_center(self):
        pano = np.zeros((128, 256, 3), dtype=np.uint8)
        pano[63:66, 127:130] = 99  # 3x3 block around the exact center
        out = equirect_to_fisheye(pano, SEEN, ImageSize(128, 128))
        assert tuple(out[64, 64]) == (99, 99, 99)

    def test_distinct_presets_render_differently(self):
        faces = smooth_faces(32, seed=7)
        seen = get_preset("seen_param").model
        p3 = get_preset("param3").model
        p4 = get_preset("param4").model
        size = ImageSize(128, 128)
        r_seen = render_fisheye(faces, seen, size)
        r_p3 = render_fisheye(faces, p3, size)
        r_p4 = render_fisheye(faces, p4, size)
        assert not np.array_equal(r_p3, r_p4)
        # seen_param at scale 1.0 is exactly param3
        seen_s1 = CameraModel(seen.params, output_scale=1.0)
        assert np.array_equal(render_fisheye(faces, seen_s1, size), r_p3)
        assert not np.array_equal(r_seen, r_p3)

    def test_235_preset_periphery_colors(self):
        faces, colors = solid_faces(32)
        preset = get_preset("sim_fisheye_235")
        out = render_fisheye(faces, preset.model, preset.output,
                             fov_cap=np.deg2rad(preset.nominal_fov))
        assert tuple(out[64, 64]) == colors[CubeFace.FRONT]
        present = {tuple(c) for c in out.reshape(-1, 3)}
        assert colors[CubeFace.BACK] not in present
        for f in (CubeFace.UP, CubeFace.DOWN, CubeFace.LEFT, CubeFace.RIGHT):
            assert colors[f] in present
        # black outside a centered disk
        ys, xs = np.nonzero(np.any(out > 0, axis=2))
        r = np.hypot(xs + 0.5 - 64, ys + 0.5 - 64)
        ys0, xs0 = np.nonzero(~np.any(out > 0, axis=2))
        r0 = np.hypot(xs0 + 0.5 - 64, ys0 + 0.5 - 64)
        assert r.max() <= r0.min() + 1.5


class TestPinhole:
    def test_90_reproduces_front_face(self):
        faces = random_faces(96, seed=3)
        out = render_pinhole(faces, np.pi / 2, ImageSize(96, 96))
        diff = np.abs(out.astype(int) - faces.faces[CubeFace.FRONT].astype(int))
        assert diff.max() <= 1

    def test_90_solid_faces_only_front_color(self):
        faces, colors = solid_faces(64)
        out = render_pinhole(faces, np.pi / 2, ImageSize(64, 64))
        assert {tuple(c) for c in out.reshape(-1, 3)} == {colors[CubeFace.FRONT]}

    def test_60_is_center_crop_of_90_content(self):
        faces = smooth_faces(128, seed=5)
        size = ImageSize(128, 128)
        wide = render_pinhole(faces, np.pi / 2, size)
        narrow = render_pinhole(faces, np.deg2rad(60), size)
        # the 60-degree view magnifies the central tan(30)/tan(45) fraction
        frac = np.tan(np.deg2rad(30))
        half = int(round(64 * frac))
        from omniwarp.augment import resize_bilinear
        crop = wide[64 - half:64 + half, 64 - half:64 + half]
        up = resize_bilinear(crop, size)
        diff = np.abs(up.astype(int) - narrow.astype(int))
        # resampling chains differ; content must match closely
        assert np.percentile(diff, 99) <= 6

    def test_domain_boundary(self):
        faces, _ = solid_faces(16)
        render_pinhole(faces, np.deg2rad(179.9), ImageSize(32, 32))
        with pytest.raises(UnachievableFovError):
            render_pinhole(faces, np.pi, ImageSize(32, 32))


class TestPngIO:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        img = rng.integers(0, 256, size=(20, 30, 3), dtype=np.uint8)
        write_png(img, tmp_path / "x.png")
        assert np.array_equal(read_png(tmp_path / "x.png"), img)

    def test_rgba(self, tmp_path):
        img = np.zeros((4, 4, 4), dtype=np.uint8)
        img[..., 3] = 128
        write_png(img, tmp_path / "a.png")
        assert np.array_equal(read_png(tmp_path / "a.png"), img)
