"""omniwarp: cubemap -> equirectangular -> fisheye projection pipeline with
precomputed remap tables and scale augmentation."""

__version__ = "0.1.0"

from .geometry import CubeFace, ImageSize
from .models import (
    CameraModel,
    DsParams,
    EucmParams,
    PinholeParams,
    fit_focal_for_fov,
    max_half_fov,
    project,
    unproject,
)
from .remap import RemapTable, SamplerConfig, TableCache, apply, compose
from .pipeline import (
    CubemapFaces,
    cubemap_to_equirect,
    equirect_to_fisheye,
    load_cubemap_dir,
    read_png,
    render_fisheye,
    render_pinhole,
    write_png,
)
from .augment import (
    RsaConfig,
    SweepSpec,
    center_scale,
    fixed_crop,
    rsa_apply,
    rsa_stream,
    scale_sweep,
)
from .presets import CameraPreset, builtin_presets, get_preset
from .config import RunConfig, load_config, save_config

__all__ = [
    "CameraModel", "CameraPreset", "CubeFace", "CubemapFaces", "DsParams",
    "EucmParams", "ImageSize", "PinholeParams", "RemapTable", "RsaConfig",
    "RunConfig", "SamplerConfig", "SweepSpec", "TableCache", "apply",
    "builtin_presets", "center_scale", "compose", "cubemap_to_equirect",
    "equirect_to_fisheye", "fit_focal_for_fov", "fixed_crop", "get_preset",
    "load_config", "load_cubemap_dir", "max_half_fov", "project", "read_png",
    "render_fisheye", "render_pinhole", "rsa_apply", "rsa_stream",
    "save_config", "scale_sweep", "unproject", "write_png",
]
