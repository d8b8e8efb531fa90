"""Built-in camera presets and the named registry.

The six parameterized lens rows (seen_param, param1..param5) carry exact
published intrinsics; the four nominal-FoV presets (sim/real pinhole and
fisheye) are realized by fitting the focal length to the quoted FoV at
the profile's output resolution.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .errors import UnknownPresetError
from .geometry import ImageSize
from .models import (
    CameraModel,
    DsParams,
    EucmParams,
    PinholeParams,
    fit_focal_for_fov,
)

SIM_SIZE = ImageSize(128, 128)
REAL_SIZE = ImageSize(224, 224)


@dataclass(frozen=True)
class CameraPreset:
    name: str
    model: CameraModel
    output: ImageSize
    profile: str = "sim"            # "sim" or "real"
    nominal_fov: Optional[float] = None  # degrees, when defined by FoV


def _eucm(f, alpha, beta, scale, size: ImageSize) -> CameraModel:
    return CameraModel(EucmParams(f, alpha, beta, size.width / 2.0, size.height / 2.0),
                       output_scale=scale)


def _ds(f, alpha, xi, scale, size: ImageSize) -> CameraModel:
    return CameraModel(DsParams(f, alpha, xi, size.width / 2.0, size.height / 2.0),
                       output_scale=scale)


def _fitted(template: CameraModel, fov_deg: float, size: ImageSize) -> CameraModel:
    f = fit_focal_for_fov(template, np.deg2rad(fov_deg), size)
    return template.with_focal(f)


@functools.lru_cache(maxsize=1)
def builtin_presets() -> Dict[str, CameraPreset]:
    """Registry of the ten named presets (immutable after construction)."""
    registry: Dict[str, CameraPreset] = {}

    def add(preset: CameraPreset):
        registry[preset.name] = preset

    add(CameraPreset("seen_param", _eucm(45, 0.4, 2.0, 0.9, SIM_SIZE), SIM_SIZE))
    add(CameraPreset("param1", _eucm(60, 0.5, 2.0, 1.0, SIM_SIZE), SIM_SIZE))
    add(CameraPreset("param2", _ds(50, 0.5, 0.1, 1.0, SIM_SIZE), SIM_SIZE))
    add(CameraPreset("param3", _eucm(45, 0.4, 2.0, 1.0, SIM_SIZE), SIM_SIZE))
    add(CameraPreset("param4", _eucm(45, 0.4, 2.5, 1.0, SIM_SIZE), SIM_SIZE))
    add(CameraPreset("param5", _eucm(35, 0.4, 1.2, 1.0, SIM_SIZE), SIM_SIZE))

    pin_sim = CameraModel(PinholeParams(64.0, SIM_SIZE.width / 2.0, SIM_SIZE.height / 2.0))
    pin_real = CameraModel(PinholeParams(1.0, REAL_SIZE.width / 2.0, REAL_SIZE.height / 2.0))
    add(CameraPreset("sim_pinhole_90", _fitted(pin_sim, 90.0, SIM_SIZE),
                     SIM_SIZE, "sim", 90.0))
    add(CameraPreset("sim_fisheye_235", _fitted(_eucm(45, 0.4, 2.0, 1.0, SIM_SIZE),
                                                235.0, SIM_SIZE),
                     SIM_SIZE, "sim", 235.0))
    add(CameraPreset("real_pinhole_60", _fitted(pin_real, 60.0, REAL_SIZE),
                     REAL_SIZE, "real", 60.0))
    add(CameraPreset("real_fisheye_180", _fitted(_eucm(45, 0.4, 2.0, 1.0, REAL_SIZE),
                                                 180.0, REAL_SIZE),
                     REAL_SIZE, "real", 180.0))
    return registry


def get_preset(name: str) -> CameraPreset:
    registry = builtin_presets()
    if name not in registry:
        raise UnknownPresetError(name, sorted(registry))
    return registry[name]


def preset_names() -> list:
    return sorted(builtin_presets())


def preset_to_dict(preset: CameraPreset) -> dict:
    """Config-format representation of a preset (see docs/config-schema.md)."""
    p = preset.model.params
    model = {"family": preset.model.family,
             "output_scale": preset.model.output_scale,
             **{f: getattr(p, f) for f in p.__dataclass_fields__}}
    out = {"name": preset.name,
           "profile": preset.profile,
           "output": [preset.output.width, preset.output.height],
           "model": model}
    if preset.nominal_fov is not None:
        out["nominal_fov_deg"] = preset.nominal_fov
    return out
