#!/usr/bin/env python3
"""Render every builtin camera preset from one cubemap.

Writes <out>/<preset>.png per preset plus the equirect panorama, and prints
a table of each preset's achievable field of view.
"""

import argparse
from pathlib import Path

import numpy as np

from omniwarp.geometry import ImageSize
from omniwarp.models import max_half_fov
from omniwarp.pipeline import cubemap_to_equirect, load_cubemap_dir, write_png, render_fisheye
from omniwarp.presets import builtin_presets
from omniwarp.remap import TableCache


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cubemap", required=True, help="directory with face PNGs")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--cache", help="remap table cache directory")
    args = ap.parse_args()

    faces = load_cubemap_dir(args.cubemap)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cache = TableCache(args.cache) if args.cache else None

    pano = cubemap_to_equirect(
        faces, ImageSize(4 * faces.face_size, 2 * faces.face_size), cache=cache)
    write_png(pano, out / "panorama.png")

    print(f"{'preset':18s} {'family':8s} {'output':9s} {'max FoV':>8s}")
    for name, preset in sorted(builtin_presets().items()):
        cap = (np.deg2rad(preset.nominal_fov)
               if preset.nominal_fov is not None else None)
        img = render_fisheye(faces, preset.model, preset.output,
                             fov_cap=cap, cache=cache)
        write_png(img, out / f"{name}.png")
        fov = np.rad2deg(2 * max_half_fov(preset.model, preset.output))
        print(f"{name:18s} {preset.model.family:8s} "
              f"{preset.output!s:9s} {fov:7.2f}°")


if __name__ == "__main__":
    main()
