"""Batch command-line front end.

Exit codes: 0 success, 1 usage/validation, 2 I/O, 3 internal error.
All outputs are written atomically (temp file then rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .augment import (
    DEFAULT_SWEEP_SCALES,
    RsaConfig,
    SweepSpec,
    fixed_crop,
    rsa_apply,
    rsa_stream,
    scale_sweep,
)
from .config import load_config, model_from_dict
from .errors import CacheError, ConfigError, OmniwarpError, ValidationError
from .geometry import ImageSize
from .models import image_circle_radius, max_half_fov
from .pipeline import (
    DEFAULT_EQUIRECT_FACTOR,
    cubemap_to_equirect,
    load_cubemap_dir,
    read_png,
    render_fisheye,
    write_png,
)
from .presets import builtin_presets, get_preset, preset_names, preset_to_dict
from .remap import TableCache, build_fisheye_from_cubemap, cache_key

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_size(text: str) -> ImageSize:
    try:
        w, h = text.lower().split("x")
        return ImageSize(int(w), int(h))
    except (ValueError, TypeError) as e:
        raise UsageError(f"bad size {text!r}, expected WxH") from e


def _parse_model(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"--model must be a JSON object: {e}") from e
    if not isinstance(data, dict):
        raise UsageError("--model must be a JSON object")
    return model_from_dict(data)


def _camera_from_args(args, cfg):
    preset_name = args.preset or (cfg.preset if cfg else None)
    model_text = getattr(args, "model", None)
    if preset_name and model_text:
        raise UsageError("give --preset or --model, not both")
    if model_text:
        return _parse_model(model_text), None, None
    if preset_name:
        preset = get_preset(preset_name)
        fov_cap = (np.deg2rad(preset.nominal_fov)
                   if preset.nominal_fov is not None else None)
        return preset.model, preset.output, fov_cap
    if cfg and cfg.model is not None:
        return cfg.model, None, None
    raise UsageError("a camera is required: --preset, --model, or config camera block")


def _cache_from(args, cfg):
    cache_dir = getattr(args, "cache", None) or (cfg.cache_dir if cfg else None)
    if cache_dir is None:
        return None
    os.makedirs(cache_dir, exist_ok=True)
    return TableCache(cache_dir)


def _maybe_config(args):
    if getattr(args, "config", None):
        return load_config(args.config)
    return None


def cmd_render(args) -> int:
    cfg = _maybe_config(args)
    model, preset_out, preset_cap = _camera_from_args(args, cfg)
    size = (_parse_size(args.size) if args.size
            else (cfg.out_size if cfg and cfg.out_size else preset_out) or ImageSize(128, 128))
    fov_cap = preset_cap
    if args.fov_cap is not None:
        fov_cap = np.deg2rad(args.fov_cap)
    elif cfg and cfg.fov_cap_deg is not None:
        fov_cap = np.deg2rad(cfg.fov_cap_deg)
    cubemap_dir = args.cubemap or (cfg.cubemap_dir if cfg else None)
    if not cubemap_dir:
        raise UsageError("--cubemap directory is required")
    faces = load_cubemap_dir(cubemap_dir)
    cache = _cache_from(args, cfg)
    img = render_fisheye(faces, model, size, fov_cap=fov_cap, cache=cache)
    if cache is not None:
        print(f"remap table: {'cache hit' if cache.last_hit else 'built'}",
              file=sys.stderr)
    write_png(img, args.out)
    return EXIT_OK


def cmd_panorama(args) -> int:
    cfg = _maybe_config(args)
    cubemap_dir = args.cubemap or (cfg.cubemap_dir if cfg else None)
    if not cubemap_dir:
        raise UsageError("--cubemap directory is required")
    width = args.width if args.width else DEFAULT_EQUIRECT_FACTOR * 128
    if width % 2 != 0:
        raise UsageError(f"panorama width must be even (2:1 aspect), got {width}")
    faces = load_cubemap_dir(cubemap_dir)
    cache = _cache_from(args, cfg)
    pano = cubemap_to_equirect(faces, ImageSize(width, width // 2), cache=cache)
    write_png(pano, args.out)
    return EXIT_OK


def _augment_inputs(path):
    if os.path.isdir(path):
        names = sorted(n for n in os.listdir(path) if n.lower().endswith(".png"))
        if not names:
            raise FileNotFoundError(f"no PNG files in {path}")
        return [(n, os.path.join(path, n)) for n in names]
    if not os.path.exists(path):
        raise FileNotFoundError(f"input not found: {path}")
    return [(os.path.basename(path), path)]


def cmd_augment(args) -> int:
    cfg = _maybe_config(args)
    aug = cfg.augment if cfg else None
    mode = args.mode or (aug.mode if aug else None)
    if mode not in ("rsa", "fixed"):
        raise UsageError("--mode must be rsa or fixed")
    target = _parse_size(args.target) if args.target else (aug.target if aug else None)
    if target is None:
        raise UsageError("--target WxH is required")
    seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
    inputs = _augment_inputs(args.input)
    os.makedirs(args.out, exist_ok=True)
    if mode == "rsa":
        s_lo = args.s_lo if args.s_lo is not None else (aug.s_lo if aug else 0.7)
        s_hi = args.s_hi if args.s_hi is not None else (aug.s_hi if aug else 1.3)
        rsa_cfg = RsaConfig(s_lo, s_hi, target, seed)
        for idx, (name, path) in enumerate(inputs):
            img = read_png(path)
            out, s = rsa_apply(img, rsa_cfg, rsa_stream(seed, idx))
            write_png(out, os.path.join(args.out, name))
            print(f"{name} s={s:.6f}")
    else:
        scale = args.scale if args.scale is not None else (aug.scale if aug else 0.95)
        for name, path in inputs:
            img = read_png(path)
            write_png(fixed_crop(img, scale, target), os.path.join(args.out, name))
            print(f"{name} scale={scale:.4f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _maybe_config(args)
    aug = cfg.augment if cfg else None
    target = _parse_size(args.target) if args.target else (aug.target if aug else None)
    if target is None:
        raise UsageError("--target WxH is required")
    if args.scales:
        try:
            scales = tuple(float(s) for s in args.scales.split(","))
        except ValueError as e:
            raise UsageError(f"bad --scales list: {args.scales!r}") from e
    elif aug:
        scales = tuple(aug.scales)
    else:
        scales = DEFAULT_SWEEP_SCALES
    spec = SweepSpec(scales, target)
    img = read_png(args.input)
    stem = os.path.splitext(os.path.basename(args.input))[0]
    os.makedirs(args.out, exist_ok=True)
    for s, out in zip(spec.scales, scale_sweep(img, spec)):
        name = f"{stem}_S{s:.2f}.png"
        write_png(out, os.path.join(args.out, name))
        print(name)
    return EXIT_OK


def _preset_report(name: str, size=None) -> dict:
    preset = get_preset(name)
    out = preset_to_dict(preset)
    probe = size or preset.output
    fov = 2.0 * max_half_fov(preset.model, probe)
    out["max_fov_deg"] = round(float(np.rad2deg(fov)), 3)
    radius = image_circle_radius(preset.model)
    out["image_circle_radius_px"] = (None if radius == float("inf")
                                     else round(float(radius), 3))
    key = cache_key(op="fisheye_from_cubemap", model=preset.model, dst=probe,
                    face_size=probe.width,
                    fov_cap=(np.deg2rad(preset.nominal_fov)
                             if preset.nominal_fov is not None else None))
    table = build_fisheye_from_cubemap(
        preset.model, probe, probe.width,
        np.deg2rad(preset.nominal_fov) if preset.nominal_fov is not None else None)
    ys, xs = np.nonzero(table.mask)
    if len(xs):
        r = np.hypot(xs + 0.5 - probe.width / 2, ys + 0.5 - probe.height / 2)
        out["valid_disk_radius_px"] = round(float(r.max()), 3)
    else:
        out["valid_disk_radius_px"] = 0.0
    out["table_key"] = key
    return out


def _print_preset_human(info: dict):
    model = info["model"]
    params = ", ".join(f"{k}={v}" for k, v in model.items() if k != "family")
    print(f"{info['name']}: {model['family']} ({params})")
    print(f"  profile: {info['profile']}  output: {info['output'][0]}x{info['output'][1]}")
    if "nominal_fov_deg" in info:
        print(f"  nominal FoV: {info['nominal_fov_deg']:.1f} deg")
    print(f"  max FoV: {info['max_fov_deg']:.2f} deg")
    print(f"  valid disk radius: {info['valid_disk_radius_px']} px")


def cmd_presets(args) -> int:
    if args.action == "list":
        if args.json:
            print(json.dumps(preset_names()))
        else:
            for name in preset_names():
                p = builtin_presets()[name]
                print(f"{name:18s} {p.model.family:8s} {p.profile:4s} "
                      f"{p.output.width}x{p.output.height}")
        return EXIT_OK
    if not args.name:
        raise UsageError("presets show requires a preset name")
    info = _preset_report(args.name)
    if args.json:
        print(json.dumps(info, indent=2))
    else:
        _print_preset_human(info)
    return EXIT_OK


def cmd_inspect(args) -> int:
    size = _parse_size(args.size) if args.size else None
    info = _preset_report(args.preset, size)
    if args.json:
        print(json.dumps(info, indent=2))
    else:
        _print_preset_human(info)
    return EXIT_OK


def cmd_cache(args) -> int:
    directory = args.cache
    if args.action == "info":
        if not os.path.isdir(directory):
            print(f"{directory}: no cache directory")
            return EXIT_OK
        files = [f for f in os.listdir(directory) if f.endswith(".owrt")]
        total = sum(os.path.getsize(os.path.join(directory, f)) for f in files)
        print(f"{directory}: {len(files)} tables, {total} bytes")
        return EXIT_OK
    removed = 0
    if os.path.isdir(directory):
        for f in os.listdir(directory):
            if f.endswith(".owrt"):
                os.unlink(os.path.join(directory, f))
                removed += 1
    print(f"removed {removed} cached tables")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="omniwarp",
                     description="Cubemap -> equirect -> fisheye rendering and "
                                 "scale augmentation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render a fisheye/pinhole view from a cubemap")
    p.add_argument("--cubemap", help="directory with the six face PNGs")
    p.add_argument("--preset", help="named camera preset")
    p.add_argument("--model", help="inline camera model as JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--size", help="output WxH")
    p.add_argument("--fov-cap", dest="fov_cap", type=float, help="angular cap in degrees")
    p.add_argument("--cache", help="remap table cache directory")
    p.add_argument("--config", help="run-config file; flags win on conflict")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("panorama", help="stitch a cubemap into an equirect panorama")
    p.add_argument("--cubemap")
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, help="panorama width (height = width/2)")
    p.add_argument("--cache")
    p.add_argument("--config")
    p.set_defaults(func=cmd_panorama)

    p = sub.add_parser("augment", help="random or fixed scale augmentation")
    p.add_argument("--in", dest="input", required=True, help="input PNG or directory")
    p.add_argument("--mode", choices=["rsa", "fixed"])
    p.add_argument("--s-lo", dest="s_lo", type=float)
    p.add_argument("--s-hi", dest="s_hi", type=float)
    p.add_argument("--scale", type=float)
    p.add_argument("--target", help="output WxH")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("sweep", help="deterministic center-scale sweep")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--scales", help="comma-separated scale factors")
    p.add_argument("--target", help="output WxH")
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("presets", help="list or show named presets")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("inspect", help="report FoV and image circle of a preset")
    p.add_argument("--preset", required=True)
    p.add_argument("--size", help="probe WxH (defaults to the preset output)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("cache", help="inspect or clear the table cache")
    p.add_argument("action", choices=["info", "clear"])
    p.add_argument("--cache", required=True)
    p.set_defaults(func=cmd_cache)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, OSError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except CacheError as e:
        print(f"cache error: {e}", file=sys.stderr)
        return EXIT_IO
    except OmniwarpError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as e:  # pragma: no cover
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
