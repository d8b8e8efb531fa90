/**
 * In-memory 8-bit images and PNG encode/decode.
 *
 * Images are contiguous row-major RGB or RGBA buffers; shape and dtype are
 * validated at the boundary so downstream code can assume a clean layout.
 */

import { PNG } from "pngjs";

export interface ArrayImage {
  width: number;
  height: number;
  channels: 3 | 4;
  /** Row-major, `height * width * channels` bytes. */
  data: Uint8Array;
}

export class ImageShapeError extends Error {}

export function validateImage(img: ArrayImage): void {
  if (!Number.isInteger(img.width) || img.width < 1 ||
      !Number.isInteger(img.height) || img.height < 1) {
    throw new ImageShapeError(`bad image size ${img.width}x${img.height}`);
  }
  if (img.channels !== 3 && img.channels !== 4) {
    throw new ImageShapeError(`images must have 3 or 4 channels, got ${img.channels}`);
  }
  const expected = img.width * img.height * img.channels;
  if (!(img.data instanceof Uint8Array)) {
    throw new ImageShapeError("image data must be a Uint8Array");
  }
  if (img.data.length !== expected) {
    throw new ImageShapeError(
      `image buffer has ${img.data.length} bytes, expected ${expected}`);
  }
}

export function decodePng(bytes: Uint8Array): ArrayImage {
  const png = PNG.sync.read(Buffer.from(bytes));
  // pngjs always expands to RGBA; collapse back to RGB when alpha is opaque
  const rgba = new Uint8Array(png.data);
  let opaque = true;
  for (let i = 3; i < rgba.length; i += 4) {
    if (rgba[i] !== 255) { opaque = false; break; }
  }
  if (!opaque) {
    return { width: png.width, height: png.height, channels: 4, data: rgba };
  }
  const rgb = new Uint8Array(png.width * png.height * 3);
  for (let p = 0, q = 0; p < rgba.length; p += 4, q += 3) {
    rgb[q] = rgba[p];
    rgb[q + 1] = rgba[p + 1];
    rgb[q + 2] = rgba[p + 2];
  }
  return { width: png.width, height: png.height, channels: 3, data: rgb };
}

export function encodePng(img: ArrayImage): Uint8Array {
  validateImage(img);
  const png = new PNG({ width: img.width, height: img.height });
  if (img.channels === 4) {
    png.data = Buffer.from(img.data);
  } else {
    const rgba = Buffer.alloc(img.width * img.height * 4, 255);
    for (let p = 0, q = 0; q < img.data.length; p += 4, q += 3) {
      rgba[p] = img.data[q];
      rgba[p + 1] = img.data[q + 1];
      rgba[p + 2] = img.data[q + 2];
    }
    png.data = rgba;
  }
  return new Uint8Array(PNG.sync.write(png));
}

export function imagesEqual(a: ArrayImage, b: ArrayImage): boolean {
  return a.width === b.width && a.height === b.height &&
         a.channels === b.channels &&
         Buffer.compare(Buffer.from(a.data), Buffer.from(b.data)) === 0;
}
