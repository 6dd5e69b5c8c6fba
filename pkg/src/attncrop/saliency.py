"""Spectral saliency from a hypercomplex Fourier transform.

A color image is encoded as a pure-quaternion signal (intensity and two
color-opponent channels on the i/j/k axes), transformed with a 2-D
hypercomplex Fourier transform, its amplitude spectrum smoothed with a
Gaussian at several dyadic scales, and the signal reconstructed from the
smoothed amplitude and the original phase (direction) field.  The scale
whose saliency map has minimal histogram entropy wins.

Transform convention: the quaternion signal is split symplectically into
two complex planes (w + x*i) and (y + z*i), each transformed with a plain
2-D FFT.  The forward transform is unnormalized; the inverse carries the
1/(H*W) factor, so a DC-only spectrum of value c inverts to the constant
c/(H*W).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import cv2
import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import InvalidConfigError, InvalidInputError

DEFAULT_HISTOGRAM_BINS = 256


@dataclass(frozen=True)
class FeatureChannels:
    """Intensity + color-opponent planes feeding the quaternion transform."""

    intensity: np.ndarray
    rg_opponent: np.ndarray
    by_opponent: np.ndarray

    def __post_init__(self):
        if not (self.intensity.shape == self.rg_opponent.shape == self.by_opponent.shape):
            raise InvalidInputError("feature channels must share dimensions")


@dataclass(frozen=True)
class QuaternionSpectrum:
    """Per-bin quaternion FFT coefficients, split into amplitude * direction.

    ``coeffs`` has shape (H, W, 4) holding the (w, x, y, z) quaternion
    components per frequency bin.  ``direction`` is the unit-quaternion
    field (exactly zero where the amplitude is zero).
    """

    coeffs: np.ndarray
    amplitude: np.ndarray
    direction: np.ndarray

    @classmethod
    def from_coeffs(cls, coeffs: np.ndarray) -> "QuaternionSpectrum":
        if coeffs.ndim != 3 or coeffs.shape[-1] != 4:
            raise InvalidInputError("quaternion coefficients must have shape (H, W, 4)")
        amplitude = np.sqrt(np.sum(coeffs * coeffs, axis=-1))
        with np.errstate(invalid="ignore", divide="ignore"):
            direction = np.where(
                amplitude[..., None] > 0.0, coeffs / amplitude[..., None], 0.0
            )
        return cls(coeffs=coeffs, amplitude=amplitude, direction=direction)

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape[:2]


@dataclass(frozen=True)
class SaliencyMap:
    """Min-max normalized saliency values plus scale-selection metadata."""

    values: np.ndarray
    source_scale_index: int = 0
    entropy: float = 0.0

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class ScaleSpaceConfig:
    """Knobs for the scale-space saliency computation.

    ``num_scales="auto"`` builds a dyadic ladder sigma_k = 2**(k-1) * base_sigma
    for k = 1..floor(log2(working_size)) + 1.  ``manual_scale`` bypasses
    entropy selection: an int picks a ladder index, a float gives a sigma
    directly (the recorded scale index is then the nearest ladder rung).
    """

    base_sigma: float = 0.5
    num_scales: int | str = "auto"
    manual_scale: int | float | None = None
    working_size: int = 128
    histogram_bins: int = DEFAULT_HISTOGRAM_BINS
    post_smooth_sigma: float = 3.0

    def __post_init__(self):
        if self.working_size < 16:
            raise InvalidConfigError("working_size must be >= 16")
        if self.histogram_bins < 2:
            raise InvalidConfigError("histogram_bins must be >= 2")
        if self.base_sigma <= 0:
            raise InvalidConfigError("base_sigma must be positive")
        if self.num_scales != "auto" and (
            not isinstance(self.num_scales, int) or self.num_scales < 1
        ):
            raise InvalidConfigError("num_scales must be a positive integer or 'auto'")

    def scale_sigmas(self) -> list[float]:
        if self.num_scales == "auto":
            count = int(math.floor(math.log2(self.working_size))) + 1
        else:
            count = self.num_scales
        return [self.base_sigma * 2.0 ** k for k in range(count)]


def _validate_image(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != 3:
        raise InvalidInputError("expected an H x W x 3 raster")
    if image.shape[0] == 0 or image.shape[1] == 0:
        raise InvalidInputError("image has a zero dimension")
    if not np.all(np.isfinite(image)):
        raise InvalidInputError("image contains non-finite values")
    return np.clip(image, 0.0, 1.0)


def extract_feature_channels(image: np.ndarray, working_size: int) -> FeatureChannels:
    """Downscale to a square working raster and split into I/RG/BY planes."""
    image = _validate_image(image)
    if working_size < 1:
        raise InvalidInputError("working_size must be positive")
    if image.shape[:2] != (working_size, working_size):
        image = cv2.resize(
            image, (working_size, working_size), interpolation=cv2.INTER_LINEAR
        )
        image = np.clip(image, 0.0, 1.0)

    r, g, b = image[..., 0], image[..., 1], image[..., 2]
    intensity = (r + g + b) / 3.0
    # Broadly-tuned opponent channels, zero for achromatic input.
    cr = r - (g + b) / 2.0
    cg = g - (r + b) / 2.0
    cb = b - (r + g) / 2.0
    cy = (r + g) / 2.0 - np.abs(r - g) / 2.0 - b
    return FeatureChannels(intensity=intensity, rg_opponent=cr - cg, by_opponent=cb - cy)


def hft_forward(channels: FeatureChannels) -> QuaternionSpectrum:
    """2-D hypercomplex FFT of the pure-quaternion signal I*i + RG*j + BY*k."""
    f1 = np.fft.fft2(1j * channels.intensity)
    f2 = np.fft.fft2(channels.rg_opponent + 1j * channels.by_opponent)
    coeffs = np.stack([f1.real, f1.imag, f2.real, f2.imag], axis=-1)
    return QuaternionSpectrum.from_coeffs(coeffs)


def hft_inverse(spectrum: QuaternionSpectrum) -> np.ndarray:
    """Inverse transform back to an (H, W, 4) quaternion raster."""
    coeffs = spectrum.coeffs
    if coeffs.ndim != 3 or coeffs.shape[-1] != 4:
        raise InvalidInputError("spectrum coefficients must have shape (H, W, 4)")
    g1 = np.fft.ifft2(coeffs[..., 0] + 1j * coeffs[..., 1])
    g2 = np.fft.ifft2(coeffs[..., 2] + 1j * coeffs[..., 3])
    return np.stack([g1.real, g1.imag, g2.real, g2.imag], axis=-1)


def smooth_amplitude(spectrum: QuaternionSpectrum, sigma: float) -> np.ndarray:
    """Convolve the amplitude spectrum with a unit-sum Gaussian (wrap-around)."""
    if sigma <= 0:
        raise InvalidInputError("sigma must be positive")
    return gaussian_filter(spectrum.amplitude, sigma=sigma, mode="wrap")


def histogram_entropy(values: np.ndarray, bins: int = DEFAULT_HISTOGRAM_BINS) -> float:
    """Shannon entropy (bits) of a fixed-bin histogram over [0, 1]."""
    counts, _ = np.histogram(values, bins=bins, range=(0.0, 1.0))
    p = counts[counts > 0] / values.size
    return float(-np.sum(p * np.log2(p)))


def _normalize(values: np.ndarray) -> np.ndarray:
    lo = float(values.min())
    hi = float(values.max())
    if hi - lo <= 0.0:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def reconstruct_saliency(
    smoothed_amplitude: np.ndarray,
    direction: np.ndarray,
    post_sigma: float,
    histogram_bins: int = DEFAULT_HISTOGRAM_BINS,
    source_scale_index: int = 0,
) -> SaliencyMap:
    """Rebuild the signal from smoothed amplitude + original direction field.

    The squared quaternion norm of the reconstruction, mildly smoothed
    spatially, becomes the saliency map after min-max normalization.
    """
    if smoothed_amplitude.shape != direction.shape[:2]:
        raise InvalidInputError("amplitude and direction dimensions differ")
    coeffs = smoothed_amplitude[..., None] * direction
    recon = hft_inverse(QuaternionSpectrum.from_coeffs(coeffs))
    s_raw = np.sum(recon * recon, axis=-1)
    if post_sigma > 0:
        s_raw = gaussian_filter(s_raw, sigma=post_sigma, mode="reflect")
    values = _normalize(s_raw)
    return SaliencyMap(
        values=values,
        source_scale_index=source_scale_index,
        entropy=histogram_entropy(values, histogram_bins),
    )


def select_scale(candidates: list[SaliencyMap]) -> tuple[int, SaliencyMap]:
    """Pick the candidate with minimal entropy; ties go to the lowest index."""
    if not candidates:
        raise InvalidInputError("no saliency candidates to select from")
    index = int(np.argmin([c.entropy for c in candidates]))
    return index, candidates[index]


def compute_working_saliency(image: np.ndarray, config: ScaleSpaceConfig) -> SaliencyMap:
    """Full saliency pipeline at working resolution (no final upscale)."""
    channels = extract_feature_channels(image, config.working_size)
    spectrum = hft_forward(channels)
    sigmas = config.scale_sigmas()

    manual = config.manual_scale
    if manual is not None:
        if isinstance(manual, int) and not isinstance(manual, bool):
            if not 0 <= manual < len(sigmas):
                raise InvalidConfigError(
                    f"manual scale index {manual} outside ladder 0..{len(sigmas) - 1}"
                )
            sigma, index = sigmas[manual], manual
        else:
            sigma = float(manual)
            if sigma <= 0:
                raise InvalidConfigError("manual sigma must be positive")
            index = int(np.argmin([abs(s - sigma) for s in sigmas]))
        amp = smooth_amplitude(spectrum, sigma)
        return reconstruct_saliency(
            amp,
            spectrum.direction,
            config.post_smooth_sigma,
            config.histogram_bins,
            source_scale_index=index,
        )

    candidates = [
        reconstruct_saliency(
            smooth_amplitude(spectrum, sigma),
            spectrum.direction,
            config.post_smooth_sigma,
            config.histogram_bins,
            source_scale_index=k,
        )
        for k, sigma in enumerate(sigmas)
    ]
    _, best = select_scale(candidates)
    return best


def compute_saliency(image: np.ndarray, config: ScaleSpaceConfig) -> SaliencyMap:
    """Saliency map upscaled (bilinear) and renormalized to the input size."""
    image = _validate_image(image)
    working = compute_working_saliency(image, config)
    h, w = image.shape[:2]
    values = cv2.resize(working.values, (w, h), interpolation=cv2.INTER_LINEAR)
    values = _normalize(values)
    return SaliencyMap(
        values=values,
        source_scale_index=working.source_scale_index,
        entropy=histogram_entropy(values, config.histogram_bins),
    )
