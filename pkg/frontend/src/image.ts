/** Image decoding, resizing, and the random-resized-crop augmentation. */

import { readFileSync } from "node:fs";
import { PNG } from "pngjs";
import jpeg from "jpeg-js";
import type { Rng } from "./rng.js";

/** Planar-free RGB raster: data[(y * width + x) * 3 + c] in [0, 1]. */
export interface Raster {
  width: number;
  height: number;
  data: Float32Array;
}

export function decodeImage(path: string): Raster {
  const bytes = readFileSync(path);
  const lower = path.toLowerCase();
  let width: number;
  let height: number;
  let rgba: Uint8Array;
  if (lower.endsWith(".png")) {
    const png = PNG.sync.read(bytes);
    width = png.width;
    height = png.height;
    rgba = png.data;
  } else if (lower.endsWith(".jpg") || lower.endsWith(".jpeg")) {
    const img = jpeg.decode(bytes, { useTArray: true });
    width = img.width;
    height = img.height;
    rgba = img.data;
  } else {
    throw new Error(`unsupported image format: ${path}`);
  }
  const data = new Float32Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    data[i * 3] = rgba[i * 4] / 255;
    data[i * 3 + 1] = rgba[i * 4 + 1] / 255;
    data[i * 3 + 2] = rgba[i * 4 + 2] / 255;
  }
  return { width, height, data };
}

/** Bilinear resample to the requested size. */
export function resize(src: Raster, width: number, height: number): Raster {
  if (src.width === width && src.height === height) {
    return { width, height, data: src.data.slice() };
  }
  const out = new Float32Array(width * height * 3);
  const sx = src.width / width;
  const sy = src.height / height;
  for (let y = 0; y < height; y++) {
    const fy = Math.min(Math.max((y + 0.5) * sy - 0.5, 0), src.height - 1);
    const y0 = Math.floor(fy);
    const y1 = Math.min(y0 + 1, src.height - 1);
    const wy = fy - y0;
    for (let x = 0; x < width; x++) {
      const fx = Math.min(Math.max((x + 0.5) * sx - 0.5, 0), src.width - 1);
      const x0 = Math.floor(fx);
      const x1 = Math.min(x0 + 1, src.width - 1);
      const wx = fx - x0;
      for (let c = 0; c < 3; c++) {
        const p00 = src.data[(y0 * src.width + x0) * 3 + c];
        const p01 = src.data[(y0 * src.width + x1) * 3 + c];
        const p10 = src.data[(y1 * src.width + x0) * 3 + c];
        const p11 = src.data[(y1 * src.width + x1) * 3 + c];
        out[(y * width + x) * 3 + c] =
          p00 * (1 - wy) * (1 - wx) +
          p01 * (1 - wy) * wx +
          p10 * wy * (1 - wx) +
          p11 * wy * wx;
      }
    }
  }
  return { width, height, data: out };
}

export function cropRaster(
  src: Raster,
  x0: number,
  y0: number,
  w: number,
  h: number,
): Raster {
  const data = new Float32Array(w * h * 3);
  for (let y = 0; y < h; y++) {
    for (let x = 0; x < w; x++) {
      for (let c = 0; c < 3; c++) {
        data[(y * w + x) * 3 + c] = src.data[((y0 + y) * src.width + x0 + x) * 3 + c];
      }
    }
  }
  return { width: w, height: h, data };
}

/**
 * Random resized crop: area fraction 0.08..1.0, aspect ratio 3/4..4/3,
 * resampled back to the target size.  Applied at train time in both the
 * AC and no-AC arms so the comparison sits on the standard pipeline.
 */
export function randomResizedCrop(src: Raster, size: number, rng: Rng): Raster {
  const area = src.width * src.height;
  for (let attempt = 0; attempt < 10; attempt++) {
    const targetArea = area * (0.08 + rng() * 0.92);
    const logRatio = Math.log(3 / 4) + rng() * (Math.log(4 / 3) - Math.log(3 / 4));
    const ratio = Math.exp(logRatio);
    const w = Math.round(Math.sqrt(targetArea * ratio));
    const h = Math.round(Math.sqrt(targetArea / ratio));
    if (w >= 1 && h >= 1 && w <= src.width && h <= src.height) {
      const x0 = Math.floor(rng() * (src.width - w + 1));
      const y0 = Math.floor(rng() * (src.height - h + 1));
      return resize(cropRaster(src, x0, y0, w, h), size, size);
    }
  }
  return resize(src, size, size);
}
