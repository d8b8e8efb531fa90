#!/usr/bin/env python3
"""Generate a synthetic cubemap for demos and smoke tests.

The faces sample a smooth color function of view direction (so the cubemap
is continuous across edges) with an optional checker overlay that makes
distortion easy to see in rendered outputs.
"""

import argparse
from pathlib import Path

import numpy as np

from omniwarp.geometry import CubeFace, cubeface_to_dir
from omniwarp.pipeline import write_png


def make_faces(face_size: int, seed: int, checker: int):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=(3, 3))
    ph = rng.uniform(0, 2 * np.pi, size=3)
    ys, xs = (np.mgrid[0:face_size, 0:face_size] + 0.5) / face_size
    faces = {}
    for f in CubeFace:
        d = cubeface_to_dir(np.full(xs.shape, int(f)), xs, ys)
        img = np.zeros((face_size, face_size, 3))
        for c in range(3):
            img[..., c] = 128 + 100 * np.sin(2.5 * d @ w[c] + ph[c])
        if checker:
            tiles = ((xs * checker).astype(int) + (ys * checker).astype(int)) % 2
            img = np.where(tiles[..., None], img, 255 - img)
        faces[f] = np.clip(img, 0, 255).astype(np.uint8)
    return faces


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--size", type=int, default=256, help="face size in px")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--checker", type=int, default=8,
                    help="checker tiles per face edge (0 disables)")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for face, img in make_faces(args.size, args.seed, args.checker).items():
        path = out / f"{face.name.lower()}.png"
        write_png(img, path)
        print(path)


if __name__ == "__main__":
    main()
