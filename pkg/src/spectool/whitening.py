"""Spectrum whitening: phase-only transform with moment restoration.

Every spectral bin is divided by its own amplitude, flattening the spectrum
while leaving phase untouched, and then the output is affinely rescaled in
the spatial domain so its mean and standard deviation match the input's.
Bins whose amplitude sits below the zero guard carry no usable phase and are
zeroed; their count is reported in the returned record.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .spectral import ImageBuffer, SpectrumMap, forward_spectrum, inverse_image

#: bins with amplitude below this are numerically zero and get no phase
AMPLITUDE_EPSILON = 1e-12


@dataclass(frozen=True)
class MomentPair:
    mean: float
    variance: float

    def __post_init__(self):
        if not (np.isfinite(self.mean) and np.isfinite(self.variance)):
            raise ValidationError("moments must be finite")
        if self.variance < 0:
            raise ValidationError("variance must be non-negative")


@dataclass(frozen=True)
class WhiteningRecord:
    """What a whitening run saw: input moments, moments of the raw
    phase-only image, and how many bins hit the zero guard."""

    original: MomentPair
    post_normalization: MomentPair
    epsilon_bins: int


def whiten(image: ImageBuffer) -> tuple[ImageBuffer, WhiteningRecord]:
    """Flatten the amplitude spectrum, then restore spatial moments.

    Raises on constant input: a zero-variance image has no moments to
    restore and its spectrum is a bare DC spike.
    """
    if image.width < 2 or image.height < 2:
        raise ValidationError("whitening needs at least a 2x2 image")
    pixels = image.pixels
    mean_o = float(pixels.mean())
    var_o = float(pixels.var())
    if var_o == 0.0 or np.all(pixels == pixels.flat[0]):
        raise ValidationError("constant image has zero variance; nothing to whiten")

    spectrum = forward_spectrum(image)
    amplitude = np.abs(spectrum.bins)
    guarded = amplitude < AMPLITUDE_EPSILON
    flat = np.divide(
        spectrum.bins, amplitude, out=np.zeros_like(spectrum.bins), where=~guarded
    )

    raw = inverse_image(SpectrumMap(flat))
    mean_n = float(raw.pixels.mean())
    var_n = float(raw.pixels.var())
    if var_n == 0.0:
        raise ValidationError("whitened image is constant; cannot restore variance")

    scale = np.sqrt(var_o) / np.sqrt(var_n)
    restored = (raw.pixels - mean_n) * scale + mean_o
    record = WhiteningRecord(
        original=MomentPair(mean_o, var_o),
        post_normalization=MomentPair(mean_n, var_n),
        epsilon_bins=int(guarded.sum()),
    )
    return ImageBuffer(restored), record


def record_sidecar(record: WhiteningRecord) -> dict:
    """JSON-ready form of a whitening record."""
    return {
        "original": {"mean": record.original.mean, "variance": record.original.variance},
        "post_normalization": {
            "mean": record.post_normalization.mean,
            "variance": record.post_normalization.variance,
        },
        "epsilon_bins": record.epsilon_bins,
    }
