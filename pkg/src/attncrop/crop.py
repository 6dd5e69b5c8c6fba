"""Saliency-rank thresholding, crop-box extraction, and the end-to-end crop.

The crop threshold is th = N * lambda where lambda is the fraction of
clusters to discard; pixels whose rank label is strictly greater than th
define a single axis-aligned bounding box in original image coordinates.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import cv2
import numpy as np

from .errors import EmptySelectionError, InvalidConfigError, InvalidInputError
from .saliency import ScaleSpaceConfig, compute_working_saliency
from .segmentation import LabelRaster, kmeans_1d, rank_labels


@dataclass(frozen=True)
class ACConfig:
    """Attention-crop parameters (cluster count, crop ratio, resize target)."""

    cluster_count: int = 3
    crop_ratio: float = 1.0 / 3.0
    target_size: tuple[int, int] | None = None  # (width, height)
    min_box_fraction: float = 0.0

    def __post_init__(self):
        if self.cluster_count < 2:
            raise InvalidConfigError("cluster_count must be >= 2")
        if not 0.0 <= self.crop_ratio < 1.0:
            raise InvalidConfigError("crop_ratio must lie in [0, 1)")
        if not 0.0 <= self.min_box_fraction <= 1.0:
            raise InvalidConfigError("min_box_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class CropBox:
    """Inclusive pixel-index bounding box."""

    row_start: int
    col_start: int
    row_end: int
    col_end: int

    def __post_init__(self):
        if self.row_start > self.row_end or self.col_start > self.col_end:
            raise InvalidInputError("crop box has negative extent")
        if self.row_start < 0 or self.col_start < 0:
            raise InvalidInputError("crop box has negative coordinates")

    @property
    def height(self) -> int:
        return self.row_end - self.row_start + 1

    @property
    def width(self) -> int:
        return self.col_end - self.col_start + 1

    @property
    def area(self) -> int:
        return self.height * self.width

    def contains(self, other: "CropBox") -> bool:
        return (
            self.row_start <= other.row_start
            and self.col_start <= other.col_start
            and self.row_end >= other.row_end
            and self.col_end >= other.col_end
        )


@dataclass(frozen=True)
class ACRecord:
    """Provenance for one attention-crop invocation."""

    box: CropBox | None
    th: float
    cluster_count: int
    crop_ratio: float
    scale_index: int
    entropy: float
    fallback: bool
    elapsed_ms: float


def threshold(cluster_count: int, crop_ratio: float) -> float:
    """th = N * lambda, kept exact; labels strictly above th qualify."""
    if cluster_count < 2:
        raise InvalidConfigError("cluster_count must be >= 2")
    if not 0.0 <= crop_ratio < 1.0:
        raise InvalidConfigError("crop_ratio must lie in [0, 1)")
    return cluster_count * crop_ratio


def crop_box(labels: LabelRaster, th: float) -> CropBox:
    """Bounding box of all pixels whose rank label exceeds th."""
    mask = labels.labels > th
    if not mask.any():
        raise EmptySelectionError(f"no label exceeds threshold {th}")
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return CropBox(
        row_start=int(rows[0]),
        col_start=int(cols[0]),
        row_end=int(rows[-1]),
        col_end=int(cols[-1]),
    )


def apply_crop(image: np.ndarray, box: CropBox) -> np.ndarray:
    """Slice the box out of the image (values copied unmodified)."""
    h, w = image.shape[:2]
    if box.row_end >= h or box.col_end >= w:
        raise InvalidInputError(f"box {box} exceeds image bounds {h}x{w}")
    return image[box.row_start : box.row_end + 1, box.col_start : box.col_end + 1].copy()


def resize_to_target(image: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    """Bilinear resize to (width, height); aspect ratio is not preserved."""
    w, h = size
    if w < 1 or h < 1:
        raise InvalidInputError("target size must be positive")
    if image.shape[:2] == (h, w):
        return image.copy()
    return cv2.resize(image, (w, h), interpolation=cv2.INTER_LINEAR)


def attention_crop(
    image: np.ndarray,
    saliency_cfg: ScaleSpaceConfig,
    ac_cfg: ACConfig,
    seed: int = 0,
) -> tuple[np.ndarray, ACRecord]:
    """Crop an image to its salient region; fall back to the original.

    Saliency and k-means run at working resolution; the rank labels are
    upscaled (nearest neighbor) so the box lands in original coordinates.
    Degenerate saliency or an empty selection returns the input unchanged
    with ``fallback=True``.
    """
    start = time.perf_counter()
    h, w = image.shape[:2]
    saliency = compute_working_saliency(image, saliency_cfg)

    model = kmeans_1d(saliency.values.ravel(), ac_cfg.cluster_count, seed=seed)
    working_labels = rank_labels(model, saliency.values.shape)
    full = cv2.resize(
        working_labels.labels.astype(np.int32),
        (w, h),
        interpolation=cv2.INTER_NEAREST,
    ).astype(np.int64)
    labels = LabelRaster(
        labels=full,
        cluster_count=working_labels.cluster_count,
        degenerate=working_labels.degenerate,
    )

    th = threshold(ac_cfg.cluster_count, ac_cfg.crop_ratio)

    def finish(out, box, fallback):
        if ac_cfg.target_size is not None:
            out = resize_to_target(out, ac_cfg.target_size)
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        record = ACRecord(
            box=box,
            th=th,
            cluster_count=ac_cfg.cluster_count,
            crop_ratio=ac_cfg.crop_ratio,
            scale_index=saliency.source_scale_index,
            entropy=saliency.entropy,
            fallback=fallback,
            elapsed_ms=elapsed_ms,
        )
        return out, record

    # A structureless map clusters into a single all-zero rank; treat any
    # degenerate single-cluster model like an empty selection.
    if labels.cluster_count < 2 or th >= labels.labels.max():
        return finish(image.copy(), None, True)

    try:
        box = crop_box(labels, th)
    except EmptySelectionError:
        return finish(image.copy(), None, True)

    if ac_cfg.min_box_fraction > 0 and box.area < ac_cfg.min_box_fraction * h * w:
        return finish(image.copy(), None, True)

    return finish(apply_crop(image, box), box, False)
