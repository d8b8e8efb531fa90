#!/usr/bin/env python3
"""Demonstrate the scale-augmentation modes on one image.

Writes a deterministic sweep over the default scale grid plus a handful of
seeded random-scale draws, and prints the drawn scales.
"""

import argparse
from pathlib import Path

from omniwarp.augment import (
    RsaConfig,
    SweepSpec,
    rsa_apply,
    rsa_stream,
    scale_sweep,
)
from omniwarp.geometry import ImageSize
from omniwarp.pipeline import read_png, write_png


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--in", dest="input", required=True, help="input PNG")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--target", default="224x224", help="output WxH")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--draws", type=int, default=4,
                    help="number of random-scale samples")
    args = ap.parse_args()

    w, h = (int(x) for x in args.target.lower().split("x"))
    target = ImageSize(w, h)
    img = read_png(args.input)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem

    spec = SweepSpec(target=target)
    for s, result in zip(spec.scales, scale_sweep(img, spec)):
        write_png(result, out / f"{stem}_sweep_S{s:.2f}.png")

    cfg = RsaConfig(target=target, seed=args.seed)
    for idx in range(args.draws):
        result, s = rsa_apply(img, cfg, rsa_stream(args.seed, idx))
        write_png(result, out / f"{stem}_rsa_{idx}.png")
        print(f"draw {idx}: s={s:.6f}")


if __name__ == "__main__":
    main()
