"""Run configuration files: strict YAML with line-numbered diagnostics.

Schema (see docs/config-schema.md): exactly one input source, an optional
camera block (preset name or inline model), an augmentation block, output
and cache locations, and an RNG seed.  Unknown keys are rejected with the
offending key and line number; presets are checked against the registry.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import List, Optional

import yaml

from .errors import ConfigError
from .geometry import ImageSize
from .models import CameraModel, DsParams, EucmParams, PinholeParams
from .presets import get_preset

_INPUT_KEYS = {"cubemap_dir", "equirect", "images"}
_CAMERA_KEYS = {"preset", "model", "fov_cap_deg"}
_MODEL_KEYS = {"family", "f", "alpha", "beta", "xi", "cx", "cy", "output_scale"}
_AUG_KEYS = {"mode", "s_lo", "s_hi", "scale", "scales", "target"}
_OUTPUT_KEYS = {"directory", "size"}
_TOP_KEYS = {"input", "camera", "augmentation", "output", "cache_dir", "seed"}


@dataclass
class AugmentBlock:
    mode: str = "none"              # rsa | fixed | sweep | none
    s_lo: float = 0.7
    s_hi: float = 1.3
    scale: float = 0.95
    scales: List[float] = field(default_factory=lambda: [0.70, 0.85, 1.00, 1.15, 1.30])
    target: Optional[ImageSize] = None


@dataclass
class RunConfig:
    cubemap_dir: Optional[str] = None
    equirect: Optional[str] = None
    images: Optional[List[str]] = None
    preset: Optional[str] = None
    model: Optional[CameraModel] = None
    fov_cap_deg: Optional[float] = None
    augment: AugmentBlock = field(default_factory=AugmentBlock)
    out_dir: str = "."
    out_size: Optional[ImageSize] = None
    cache_dir: Optional[str] = None
    seed: int = 0

    def validate(self):
        sources = [s for s in (self.cubemap_dir, self.equirect, self.images) if s]
        if len(sources) != 1:
            raise ConfigError("exactly one input source required "
                              "(cubemap_dir, equirect, or images)")
        if self.preset is not None and self.model is not None:
            raise ConfigError("give either a preset name or an inline model, not both")
        if self.preset is not None:
            get_preset(self.preset)  # raises UnknownPresetError
        if self.augment.mode not in ("rsa", "fixed", "sweep", "none"):
            raise ConfigError(f"unknown augmentation mode {self.augment.mode!r}")
        return self


def _line(node) -> int:
    return node.start_mark.line + 1


def _mapping(node, where: str) -> dict:
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"{where} must be a mapping (line {_line(node)})")
    out = {}
    for knode, vnode in node.value:
        out[knode.value] = (vnode, _line(knode))
    return out


def _check_keys(items: dict, allowed: set, where: str):
    for key, (_, line) in items.items():
        if key not in allowed:
            raise ConfigError(
                f"unknown key {key!r} in {where} at line {line}; "
                f"expected one of: {', '.join(sorted(allowed))}")


def _scalar(node, line):
    val = yaml.safe_load(yaml.serialize(node))
    return val


def _size(node, line, where) -> ImageSize:
    val = _scalar(node, line)
    if (not isinstance(val, list) or len(val) != 2
            or not all(isinstance(x, int) for x in val)):
        raise ConfigError(f"{where} must be [width, height] at line {line}")
    return ImageSize(val[0], val[1])


def model_from_dict(d: dict) -> CameraModel:
    """Build a CameraModel from a config/CLI mapping."""
    if "family" not in d:
        raise ConfigError("inline model needs a 'family' key (pinhole, eucm, or ds)")
    d = dict(d)
    family = d.pop("family")
    scale = float(d.pop("output_scale", 1.0))
    unknown = set(d) - _MODEL_KEYS
    if unknown:
        raise ConfigError(f"unknown model keys: {', '.join(sorted(unknown))}")
    try:
        if family == "pinhole":
            params = PinholeParams(float(d["f"]), float(d["cx"]), float(d["cy"]))
        elif family == "eucm":
            params = EucmParams(float(d["f"]), float(d["alpha"]), float(d["beta"]),
                                float(d["cx"]), float(d["cy"]))
        elif family == "ds":
            params = DsParams(float(d["f"]), float(d["alpha"]), float(d["xi"]),
                              float(d["cx"]), float(d["cy"]))
        else:
            raise ConfigError(f"unknown model family {family!r}")
    except KeyError as e:
        raise ConfigError(f"inline {family} model missing key {e.args[0]!r}") from e
    return CameraModel(params, output_scale=scale)


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"config parse error in {path}: {e}") from e
    if root is None:
        raise ConfigError(f"config {path} is empty")

    top = _mapping(root, "config")
    _check_keys(top, _TOP_KEYS, "config")
    cfg = RunConfig()

    if "input" in top:
        node, line = top["input"]
        items = _mapping(node, "input")
        _check_keys(items, _INPUT_KEYS, "input")
        if "cubemap_dir" in items:
            cfg.cubemap_dir = str(_scalar(*items["cubemap_dir"]))
        if "equirect" in items:
            cfg.equirect = str(_scalar(*items["equirect"]))
        if "images" in items:
            val = _scalar(*items["images"])
            if not isinstance(val, list):
                raise ConfigError(f"input.images must be a list at line {items['images'][1]}")
            cfg.images = [str(x) for x in val]

    if "camera" in top:
        node, line = top["camera"]
        items = _mapping(node, "camera")
        _check_keys(items, _CAMERA_KEYS, "camera")
        if "preset" in items:
            cfg.preset = str(_scalar(*items["preset"]))
        if "model" in items:
            mnode, mline = items["model"]
            mitems = _mapping(mnode, "camera.model")
            _check_keys(mitems, _MODEL_KEYS, "camera.model")
            cfg.model = model_from_dict({k: _scalar(*v) for k, v in mitems.items()})
        if "fov_cap_deg" in items:
            cfg.fov_cap_deg = float(_scalar(*items["fov_cap_deg"]))

    if "augmentation" in top:
        node, line = top["augmentation"]
        items = _mapping(node, "augmentation")
        _check_keys(items, _AUG_KEYS, "augmentation")
        aug = cfg.augment
        if "mode" in items:
            aug.mode = str(_scalar(*items["mode"]))
        if "s_lo" in items:
            aug.s_lo = float(_scalar(*items["s_lo"]))
        if "s_hi" in items:
            aug.s_hi = float(_scalar(*items["s_hi"]))
        if "scale" in items:
            aug.scale = float(_scalar(*items["scale"]))
        if "scales" in items:
            val = _scalar(*items["scales"])
            if not isinstance(val, list) or not val:
                raise ConfigError(
                    f"augmentation.scales must be a non-empty list at line {items['scales'][1]}")
            aug.scales = [float(x) for x in val]
        if "target" in items:
            aug.target = _size(*items["target"], "augmentation.target")

    if "output" in top:
        node, line = top["output"]
        items = _mapping(node, "output")
        _check_keys(items, _OUTPUT_KEYS, "output")
        if "directory" in items:
            cfg.out_dir = str(_scalar(*items["directory"]))
        if "size" in items:
            cfg.out_size = _size(*items["size"], "output.size")

    if "cache_dir" in top:
        cfg.cache_dir = str(_scalar(*top["cache_dir"]))
    if "seed" in top:
        val = _scalar(*top["seed"])
        if not isinstance(val, int):
            raise ConfigError(f"seed must be an integer at line {top['seed'][1]}")
        cfg.seed = val

    return cfg.validate()


def config_to_dict(cfg: RunConfig) -> dict:
    out: dict = {}
    inp = {}
    if cfg.cubemap_dir is not None:
        inp["cubemap_dir"] = cfg.cubemap_dir
    if cfg.equirect is not None:
        inp["equirect"] = cfg.equirect
    if cfg.images is not None:
        inp["images"] = list(cfg.images)
    if inp:
        out["input"] = inp
    cam = {}
    if cfg.preset is not None:
        cam["preset"] = cfg.preset
    if cfg.model is not None:
        p = cfg.model.params
        cam["model"] = {"family": cfg.model.family,
                        "output_scale": cfg.model.output_scale,
                        **{f: getattr(p, f) for f in p.__dataclass_fields__}}
    if cfg.fov_cap_deg is not None:
        cam["fov_cap_deg"] = cfg.fov_cap_deg
    if cam:
        out["camera"] = cam
    aug = cfg.augment
    block = {"mode": aug.mode, "s_lo": aug.s_lo, "s_hi": aug.s_hi,
             "scale": aug.scale, "scales": list(aug.scales)}
    if aug.target is not None:
        block["target"] = [aug.target.width, aug.target.height]
    out["augmentation"] = block
    outblk: dict = {"directory": cfg.out_dir}
    if cfg.out_size is not None:
        outblk["size"] = [cfg.out_size.width, cfg.out_size.height]
    out["output"] = outblk
    if cfg.cache_dir is not None:
        out["cache_dir"] = cfg.cache_dir
    out["seed"] = cfg.seed
    return out


def save_config(cfg: RunConfig, path) -> None:
    cfg.validate()
    text = yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
