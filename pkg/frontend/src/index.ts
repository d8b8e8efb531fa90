/**
 * TypeScript client for omniwarp.
 *
 * All operations are array-in/array-out: images are in-memory RGB(A)
 * buffers, and each call drives the omniwarp CLI in a private temp
 * directory, so outputs are exactly what the CLI would produce on the
 * same pixels.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { runCli, withTempDir } from "./cli.js";
import {
  ArrayImage,
  decodePng,
  encodePng,
  validateImage,
} from "./image.js";

export { ArrayImage, decodePng, encodePng, imagesEqual, validateImage,
         ImageShapeError } from "./image.js";
export { OmniwarpCliError, UsageError, IoError, InternalError, runCli,
         withTempDir } from "./cli.js";

export const FACE_NAMES = ["front", "back", "right", "left", "up", "down"] as const;
export type FaceName = (typeof FACE_NAMES)[number];
export type Cubemap = Record<FaceName, ArrayImage>;

export interface CameraModelSpec {
  family: "pinhole" | "eucm" | "ds";
  f: number;
  cx: number;
  cy: number;
  alpha?: number;
  beta?: number;
  xi?: number;
  output_scale?: number;
}

export interface RenderOptions {
  preset?: string;
  model?: CameraModelSpec;
  size?: { width: number; height: number };
  fovCapDeg?: number;
}

function writeCubemap(dir: string, cubemap: Cubemap): void {
  for (const face of FACE_NAMES) {
    const img = cubemap[face];
    if (!img) throw new Error(`cubemap is missing the ${face} face`);
    validateImage(img);
    writeFileSync(join(dir, `${face}.png`), encodePng(img));
  }
}

/** Render a fisheye or pinhole view of a cubemap through a lens model. */
export function renderFisheye(cubemap: Cubemap, opts: RenderOptions): ArrayImage {
  if (!opts.preset && !opts.model) {
    throw new Error("renderFisheye needs a preset name or an inline model");
  }
  return withTempDir((dir) => {
    const cube = join(dir, "cube");
    mkdirSync(cube);
    writeCubemap(cube, cubemap);
    const out = join(dir, "out.png");
    const args = ["render", "--cubemap", cube, "--out", out];
    if (opts.preset) args.push("--preset", opts.preset);
    if (opts.model) args.push("--model", JSON.stringify(opts.model));
    if (opts.size) args.push("--size", `${opts.size.width}x${opts.size.height}`);
    if (opts.fovCapDeg !== undefined) args.push("--fov-cap", String(opts.fovCapDeg));
    runCli(args);
    return decodePng(readFileSync(out));
  });
}

/** Stitch a cubemap into a 2:1 equirectangular panorama. */
export function cubemapToEquirect(cubemap: Cubemap, width: number): ArrayImage {
  return withTempDir((dir) => {
    const cube = join(dir, "cube");
    mkdirSync(cube);
    writeCubemap(cube, cubemap);
    const out = join(dir, "pano.png");
    runCli(["panorama", "--cubemap", cube, "--out", out,
            "--width", String(width)]);
    return decodePng(readFileSync(out));
  });
}

export interface TargetSize {
  width: number;
  height: number;
}

/** Crop (s <= 1) or shrink-onto-black (s > 1) about the image center. */
export function centerScale(img: ArrayImage, scale: number,
                            target: TargetSize): ArrayImage {
  validateImage(img);
  return withTempDir((dir) => {
    const src = join(dir, "in.png");
    writeFileSync(src, encodePng(img));
    const out = join(dir, "sweep");
    runCli(["sweep", "--in", src, "--scales", scale.toString(),
            "--target", `${target.width}x${target.height}`, "--out", out]);
    const name = `in_S${scale.toFixed(2)}.png`;
    return decodePng(readFileSync(join(out, name)));
  });
}

export interface RsaOptions {
  sLo?: number;
  sHi?: number;
  target: TargetSize;
  seed: number;
}

export interface RsaResult {
  image: ArrayImage;
  /** The uniformly drawn scale factor actually applied. */
  scale: number;
}

/** Random scale augmentation with a seeded, reproducible draw. */
export function rsaApply(img: ArrayImage, opts: RsaOptions): RsaResult {
  validateImage(img);
  return withTempDir((dir) => {
    const srcDir = join(dir, "in");
    mkdirSync(srcDir);
    writeFileSync(join(srcDir, "img.png"), encodePng(img));
    const out = join(dir, "out");
    const args = ["augment", "--in", srcDir, "--mode", "rsa",
                  "--target", `${opts.target.width}x${opts.target.height}`,
                  "--seed", String(opts.seed), "--out", out];
    if (opts.sLo !== undefined) args.push("--s-lo", String(opts.sLo));
    if (opts.sHi !== undefined) args.push("--s-hi", String(opts.sHi));
    const { stdout } = runCli(args);
    const match = stdout.match(/s=([0-9.]+)/);
    if (!match) throw new Error(`could not parse scale from: ${stdout.trim()}`);
    return {
      image: decodePng(readFileSync(join(out, "img.png"))),
      scale: Number(match[1]),
    };
  });
}

/** Deterministic fixed-scale center crop. */
export function fixedCrop(img: ArrayImage, scale: number,
                          target: TargetSize): ArrayImage {
  validateImage(img);
  return withTempDir((dir) => {
    const srcDir = join(dir, "in");
    mkdirSync(srcDir);
    writeFileSync(join(srcDir, "img.png"), encodePng(img));
    const out = join(dir, "out");
    runCli(["augment", "--in", srcDir, "--mode", "fixed",
            "--scale", String(scale),
            "--target", `${target.width}x${target.height}`, "--out", out]);
    return decodePng(readFileSync(join(out, "img.png")));
  });
}

/** Apply every scale in the grid; defaults to the CLI's default sweep. */
export function scaleSweep(img: ArrayImage, target: TargetSize,
                           scales?: number[]): ArrayImage[] {
  validateImage(img);
  return withTempDir((dir) => {
    const src = join(dir, "in.png");
    writeFileSync(src, encodePng(img));
    const out = join(dir, "sweep");
    const args = ["sweep", "--in", src,
                  "--target", `${target.width}x${target.height}`, "--out", out];
    if (scales) args.push("--scales", scales.join(","));
    const { stdout } = runCli(args);
    return stdout.trim().split("\n").map((name) =>
      decodePng(readFileSync(join(out, name))));
  });
}

/** Names of every builtin camera preset, sorted. */
export function presets(): string[] {
  return JSON.parse(runCli(["presets", "list", "--json"]).stdout) as string[];
}

export interface PresetInfo {
  name: string;
  profile: string;
  output: [number, number];
  model: Record<string, unknown> & { family: string };
  nominal_fov_deg?: number;
  max_fov_deg: number;
  image_circle_radius_px: number | null;
  valid_disk_radius_px: number;
  table_key: string;
}

/** Full parameter and field-of-view report for one preset. */
export function inspectPreset(name: string,
                              size?: TargetSize): PresetInfo {
  const args = ["inspect", "--preset", name, "--json"];
  if (size) args.push("--size", `${size.width}x${size.height}`);
  return JSON.parse(runCli(args).stdout) as PresetInfo;
}
