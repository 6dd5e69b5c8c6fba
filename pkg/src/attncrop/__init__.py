"""Saliency-driven attention cropping for offline dataset preprocessing."""

from .batch import (
    JobConfig,
    ManifestRecord,
    RunSummary,
    emit_debug_artifacts,
    load_image,
    read_manifest,
    run_batch,
    save_image,
    write_manifest,
)
from .crop import (
    ACConfig,
    ACRecord,
    CropBox,
    apply_crop,
    attention_crop,
    crop_box,
    resize_to_target,
    threshold,
)
from .errors import (
    AttentionCropError,
    EmptySelectionError,
    InvalidConfigError,
    InvalidInputError,
)
from .saliency import (
    FeatureChannels,
    QuaternionSpectrum,
    SaliencyMap,
    ScaleSpaceConfig,
    compute_saliency,
    compute_working_saliency,
    extract_feature_channels,
    hft_forward,
    hft_inverse,
    histogram_entropy,
    reconstruct_saliency,
    select_scale,
    smooth_amplitude,
)
from .segmentation import ClusterModel, LabelRaster, kmeans_1d, rank_labels

__all__ = [
    "ACConfig",
    "ACRecord",
    "AttentionCropError",
    "ClusterModel",
    "CropBox",
    "EmptySelectionError",
    "FeatureChannels",
    "InvalidConfigError",
    "InvalidInputError",
    "JobConfig",
    "LabelRaster",
    "ManifestRecord",
    "QuaternionSpectrum",
    "RunSummary",
    "SaliencyMap",
    "ScaleSpaceConfig",
    "apply_crop",
    "attention_crop",
    "compute_saliency",
    "compute_working_saliency",
    "crop_box",
    "emit_debug_artifacts",
    "extract_feature_channels",
    "hft_forward",
    "hft_inverse",
    "histogram_entropy",
    "kmeans_1d",
    "load_image",
    "rank_labels",
    "read_manifest",
    "reconstruct_saliency",
    "resize_to_target",
    "run_batch",
    "save_image",
    "select_scale",
    "smooth_amplitude",
    "threshold",
    "write_manifest",
]
