"""Parallel batch runner: walk a tree, crop every image, write manifests.

Results are a pure function of (corpus, config, global seed): per-image
seeds derive from the relative path, records are sorted by source path,
and the manifest is written atomically, so output bytes do not depend on
worker count or scheduling order.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from PIL import Image

from .crop import ACConfig, ACRecord, CropBox, attention_crop
from .errors import InvalidInputError
from .saliency import SaliencyMap, ScaleSpaceConfig, compute_working_saliency
from .segmentation import LabelRaster, kmeans_1d, rank_labels

MANIFEST_SCHEMA_VERSION = "1"
DEFAULT_EXTENSIONS = (".png", ".jpg", ".jpeg")
JPEG_QUALITY = 95

# Distinct palette for rank-label debug PNGs (dark blue -> bright red).
_LABEL_COLORS = [
    (20, 24, 82),
    (46, 110, 180),
    (120, 200, 120),
    (240, 200, 60),
    (230, 120, 40),
    (200, 30, 30),
    (250, 240, 230),
    (130, 60, 160),
]


@dataclass(frozen=True)
class JobConfig:
    input_dir: Path
    output_dir: Path
    mode: str = "crop"  # crop | augment | saliency-debug
    ac: ACConfig = field(default_factory=ACConfig)
    saliency: ScaleSpaceConfig = field(default_factory=ScaleSpaceConfig)
    workers: int = 1
    global_seed: int = 0
    manifest_path: Path | None = None
    image_extensions: tuple[str, ...] = DEFAULT_EXTENSIONS
    infer_labels: bool = True

    def __post_init__(self):
        if self.mode not in ("crop", "augment", "saliency-debug"):
            raise InvalidInputError(f"unknown mode {self.mode!r}")
        if self.workers < 1:
            raise InvalidInputError("workers must be >= 1")


@dataclass(frozen=True)
class ManifestRecord:
    source_path: str
    outputs: tuple[str, ...]
    label: str | None
    box: tuple[int, int, int, int] | None  # row_start, col_start, row_end, col_end
    th: float
    scale_index: int
    entropy: float
    fallback: bool
    elapsed_ms: float

    def to_json(self) -> str:
        payload = {
            "schema_version": MANIFEST_SCHEMA_VERSION,
            "source_path": self.source_path,
            "outputs": list(self.outputs),
            "label": self.label,
            "box": list(self.box) if self.box is not None else None,
            "th": self.th,
            "scale_index": self.scale_index,
            "entropy": self.entropy,
            "fallback": self.fallback,
            "elapsed_ms": self.elapsed_ms,
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "ManifestRecord":
        d = json.loads(line)
        return cls(
            source_path=d["source_path"],
            outputs=tuple(d["outputs"]),
            label=d["label"],
            box=tuple(d["box"]) if d["box"] is not None else None,
            th=d["th"],
            scale_index=d["scale_index"],
            entropy=d["entropy"],
            fallback=d["fallback"],
            elapsed_ms=d["elapsed_ms"],
        )


@dataclass
class RunSummary:
    processed: int = 0
    skipped: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)
    total_seconds: float = 0.0

    @property
    def throughput(self) -> float:
        return self.processed / self.total_seconds if self.total_seconds > 0 else 0.0


def load_image(path: Path) -> np.ndarray:
    """Decode to an H x W x 3 float raster in [0, 1], RGB order."""
    with Image.open(path) as img:
        rgb = img.convert("RGB")
        return np.asarray(rgb, dtype=np.float64) / 255.0


def save_image(path: Path, image: np.ndarray) -> None:
    data = np.round(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
    out = Image.fromarray(data, mode="RGB")
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() in (".jpg", ".jpeg"):
        out.save(path, quality=JPEG_QUALITY)
    else:
        out.save(path)


def saliency_to_png(saliency: SaliencyMap, path: Path) -> None:
    """8-bit grayscale export, linear quantization of [0, 1] to 0..255."""
    data = np.round(np.clip(saliency.values, 0.0, 1.0) * 255.0).astype(np.uint8)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(data, mode="L").save(path)


def labels_to_png(labels: LabelRaster, path: Path) -> None:
    """Indexed-color export with one palette entry per rank."""
    idx = (labels.labels - 1).astype(np.uint8)
    img = Image.fromarray(idx, mode="P")
    palette = []
    for i in range(256):
        palette.extend(_LABEL_COLORS[i % len(_LABEL_COLORS)])
    img.putpalette(palette)
    path.parent.mkdir(parents=True, exist_ok=True)
    img.save(path)


def emit_debug_artifacts(
    image: np.ndarray,
    saliency: SaliencyMap,
    labels: LabelRaster,
    out_prefix: Path,
) -> list[Path]:
    """Write the intermediate saliency/segmentation pictures next to the crop."""
    del image  # present for interface symmetry; artifacts derive from the fields
    saliency_path = out_prefix.with_name(out_prefix.name + ".saliency.png")
    labels_path = out_prefix.with_name(out_prefix.name + ".labels.png")
    saliency_to_png(saliency, saliency_path)
    labels_to_png(labels, labels_path)
    return [saliency_path, labels_path]


def derive_seed(rel_path: str, global_seed: int) -> int:
    digest = hashlib.sha256(rel_path.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") ^ (global_seed & 0xFFFFFFFFFFFFFFFF)


def _variant_path(out_dir: Path, rel: Path, tag: str | None) -> Path:
    if tag is None:
        return out_dir / rel
    return (out_dir / rel).with_name(rel.stem + f".{tag}" + rel.suffix)


def _process_one(config: JobConfig, rel_str: str) -> ManifestRecord:
    rel = Path(rel_str)
    src = config.input_dir / rel
    start = time.perf_counter()
    image = load_image(src)
    seed = derive_seed(rel_str, config.global_seed)

    cropped, record = attention_crop(image, config.saliency, config.ac, seed=seed)

    outputs: list[Path] = []
    if config.mode == "augment":
        orig_path = _variant_path(config.output_dir, rel, "orig")
        orig_path.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(src, orig_path)  # byte-exact passthrough, no re-encode
        outputs.append(orig_path)
        ac_path = _variant_path(config.output_dir, rel, "ac")
    else:
        ac_path = _variant_path(config.output_dir, rel, None)
    save_image(ac_path, cropped)
    outputs.append(ac_path)

    if config.mode == "saliency-debug":
        # Recompute intermediates at working size for the debug pictures.
        saliency = compute_working_saliency(image, config.saliency)
        model = kmeans_1d(saliency.values.ravel(), config.ac.cluster_count, seed=seed)
        labels = rank_labels(model, saliency.values.shape)
        prefix = config.output_dir / rel.parent / rel.stem
        outputs.extend(emit_debug_artifacts(image, saliency, labels, prefix))

    label = rel.parent.name if (config.infer_labels and rel.parent.name) else None
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    box = record.box
    return ManifestRecord(
        source_path=rel_str,
        outputs=tuple(str(p.relative_to(config.output_dir)) for p in outputs),
        label=label,
        box=(box.row_start, box.col_start, box.row_end, box.col_end) if box else None,
        th=record.th,
        scale_index=record.scale_index,
        entropy=record.entropy,
        fallback=record.fallback,
        elapsed_ms=elapsed_ms,
    )


def discover_images(config: JobConfig) -> list[str]:
    exts = tuple(e.lower() for e in config.image_extensions)
    found = [
        str(p.relative_to(config.input_dir))
        for p in sorted(config.input_dir.rglob("*"))
        if p.is_file() and p.suffix.lower() in exts
    ]
    return found


def write_manifest(records: list[ManifestRecord], path: Path) -> None:
    """JSON-lines, sorted by source path, written via temp file + rename."""
    ordered = sorted(records, key=lambda r: r.source_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for record in ordered:
            fh.write(record.to_json() + "\n")
    os.replace(tmp, path)


def read_manifest(path: Path) -> list[ManifestRecord]:
    with open(path, encoding="utf-8") as fh:
        return [ManifestRecord.from_json(line) for line in fh if line.strip()]


def run_batch(config: JobConfig) -> RunSummary:
    """Process every image under input_dir exactly once; never die per-image."""
    if not config.input_dir.is_dir():
        raise InvalidInputError(f"input directory {config.input_dir} does not exist")
    config = replace(
        config,
        input_dir=Path(config.input_dir),
        output_dir=Path(config.output_dir),
    )
    start = time.perf_counter()
    rel_paths = discover_images(config)
    config.output_dir.mkdir(parents=True, exist_ok=True)

    summary = RunSummary()
    records: list[ManifestRecord] = []

    if config.workers == 1:
        for rel in rel_paths:
            try:
                records.append(_process_one(config, rel))
                summary.processed += 1
            except Exception as exc:  # noqa: BLE001 - per-image isolation
                summary.skipped += 1
                summary.failures.append((rel, str(exc)))
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = {rel: pool.submit(_process_one, config, rel) for rel in rel_paths}
            for rel, future in futures.items():
                try:
                    records.append(future.result())
                    summary.processed += 1
                except Exception as exc:  # noqa: BLE001
                    summary.skipped += 1
                    summary.failures.append((rel, str(exc)))

    manifest_path = config.manifest_path or (config.output_dir / "manifest.jsonl")
    write_manifest(records, Path(manifest_path))
    summary.total_seconds = time.perf_counter() - start
    return summary
