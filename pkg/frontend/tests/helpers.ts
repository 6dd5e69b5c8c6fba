import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { PNG } from "pngjs";
import type { Raster } from "../src/image.js";
import type { LoadedSample } from "../src/train.js";
import { mulberry32, type Rng } from "../src/rng.js";

export function rasterFrom(
  size: number,
  fill: (x: number, y: number, c: number) => number,
): Raster {
  const data = new Float32Array(size * size * 3);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      for (let c = 0; c < 3; c++) {
        data[(y * size + x) * 3 + c] = fill(x, y, c);
      }
    }
  }
  return { width: size, height: size, data };
}

/** Two linearly separable classes: left-bright vs right-bright images. */
export function separableToySet(count: number, size = 16, seed = 0): LoadedSample[] {
  const rng = mulberry32(seed);
  const samples: LoadedSample[] = [];
  for (let i = 0; i < count; i++) {
    const label = i % 2;
    const raster = rasterFrom(size, (x) => {
      const bright = label === 0 ? x < size / 2 : x >= size / 2;
      return (bright ? 0.9 : 0.1) + (rng() - 0.5) * 0.05;
    });
    samples.push({ raster, label });
  }
  return samples;
}

export function writePng(path: string, raster: Raster): void {
  const png = new PNG({ width: raster.width, height: raster.height });
  for (let i = 0; i < raster.width * raster.height; i++) {
    png.data[i * 4] = Math.round(raster.data[i * 3] * 255);
    png.data[i * 4 + 1] = Math.round(raster.data[i * 3 + 1] * 255);
    png.data[i * 4 + 2] = Math.round(raster.data[i * 3 + 2] * 255);
    png.data[i * 4 + 3] = 255;
  }
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, PNG.sync.write(png));
}

/**
 * Synthetic "flower" corpus: a class-colored blob somewhere inside a large
 * noisy background, written as class-per-directory PNGs for the crop CLI.
 */
export function writeBlobCorpus(
  root: string,
  perClass: number,
  size = 192,
  seed = 11,
): void {
  const colors: [number, number, number][] = [
    [0.95, 0.2, 0.25],
    [0.25, 0.9, 0.3],
    [0.3, 0.35, 0.95],
  ];
  const rng = mulberry32(seed);
  colors.forEach((color, cls) => {
    for (let i = 0; i < perClass; i++) {
      const side = 40 + Math.floor(rng() * 16);
      const r0 = 8 + Math.floor(rng() * (size - side - 16));
      const c0 = 8 + Math.floor(rng() * (size - side - 16));
      const raster = rasterFrom(size, (x, y, c) => {
        const inBlob = y >= r0 && y < r0 + side && x >= c0 && x < c0 + side;
        const base = inBlob ? color[c] : 0.3;
        return clamp01(base + (rng() - 0.5) * 0.12);
      });
      writePng(join(root, `class${cls}`, `img${String(i).padStart(3, "0")}.png`), raster);
    }
  });
}

function clamp01(v: number): number {
  return Math.min(1, Math.max(0, v));
}

export function noisy(rng: Rng, base: number, amp: number): number {
  return clamp01(base + (rng() - 0.5) * amp);
}
