/** Dataset construction from the crop pipeline's JSON-lines manifests. */

import { existsSync, readFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { decodeImage, resize, type Raster } from "./image.js";
import { fnv1a } from "./rng.js";

export type AcMode = "off" | "replace" | "extend";

export interface ManifestRecord {
  schema_version: string;
  source_path: string;
  outputs: string[];
  label: string | null;
  box: number[] | null;
  th: number;
  scale_index: number;
  entropy: number;
  fallback: boolean;
  elapsed_ms: number;
}

export interface Sample {
  /** Path of the image file backing this sample. */
  path: string;
  label: number;
  /** Source path the sample derives from; split assignment hangs off it. */
  sourcePath: string;
}

export interface Dataset {
  train: Sample[];
  test: Sample[];
  classNames: string[];
  warnings: string[];
}

export function parseManifest(path: string): ManifestRecord[] {
  return readFileSync(path, "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as ManifestRecord);
}

function pickOutputs(record: ManifestRecord, useAc: AcMode): string[] {
  const orig = record.outputs.filter((o) => !/\.ac\.[^.]+$/.test(o));
  const ac = record.outputs.filter((o) => /\.ac\.[^.]+$/.test(o));
  if (useAc === "off") return orig.length > 0 ? orig.slice(0, 1) : ac.slice(0, 1);
  if (useAc === "replace") return ac.length > 0 ? ac.slice(0, 1) : orig.slice(0, 1);
  const both = [...orig.slice(0, 1), ...ac.slice(0, 1)];
  return both;
}

/** Deterministic 80/20 split keyed on the source path, not the variant. */
export function isTestSample(sourcePath: string): boolean {
  return fnv1a(sourcePath) % 5 === 0;
}

/**
 * Assemble labeled train/test samples from one or more manifests.
 * Paths inside a manifest are resolved relative to the manifest's
 * directory (the batch runner writes it next to its outputs by default);
 * dataRoot overrides that base. Missing files are skipped with a warning.
 */
export function buildDataset(
  manifestPaths: string[],
  useAc: AcMode,
  dataRoot?: string,
): Dataset {
  const classNames: string[] = [];
  const classIndex = new Map<string, number>();
  const train: Sample[] = [];
  const test: Sample[] = [];
  const warnings: string[] = [];

  for (const manifestPath of manifestPaths) {
    const base = dataRoot ?? dirname(resolve(manifestPath));
    for (const record of parseManifest(manifestPath)) {
      const label = record.label ?? "unlabeled";
      if (!classIndex.has(label)) {
        classIndex.set(label, classNames.length);
        classNames.push(label);
      }
      const cls = classIndex.get(label)!;
      for (const output of pickOutputs(record, useAc)) {
        const full = resolve(base, output);
        if (!existsSync(full)) {
          warnings.push(`missing file skipped: ${full}`);
          continue;
        }
        const sample: Sample = {
          path: full,
          label: cls,
          sourcePath: record.source_path,
        };
        (isTestSample(record.source_path) ? test : train).push(sample);
      }
    }
  }
  return { train, test, classNames, warnings };
}

/** Decode and square-resize a sample for the network input. */
export function loadSample(sample: Sample, size: number): Raster {
  return resize(decodeImage(sample.path), size, size);
}
