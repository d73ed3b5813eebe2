"""Class-wise average spectra and their accumulated sign differences.

For each frequency bin, the statistic counts the other classes whose mean
amplitude the target class exceeds, minus those it falls below; values for
a set of C classes always lie in [1-C, C-1]. Ties contribute zero, which
keeps the two-class case exactly antisymmetric.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ShapeError, ValidationError
from .spectral import ImageBuffer, forward_spectrum

#: classes whose sample counts differ by more than this factor get a warning
SIZE_IMBALANCE_FACTOR = 10.0


@dataclass(frozen=True)
class ClassSpectrum:
    """Mean amplitude spectrum of one class, DC-centered."""

    label: str
    mean_amplitude: np.ndarray
    sample_count: int
    windowed: bool = False

    def __post_init__(self):
        amp = np.array(self.mean_amplitude, dtype=np.float64, copy=True)
        if amp.ndim != 2:
            raise ValidationError("mean amplitude must be 2-D")
        if not np.isfinite(amp).all() or (amp < 0).any():
            raise ValidationError("mean amplitude must be finite and non-negative")
        if self.sample_count < 1:
            raise ValidationError("sample count must be at least 1")
        object.__setattr__(self, "mean_amplitude", amp)

    @property
    def height(self) -> int:
        return self.mean_amplitude.shape[0]

    @property
    def width(self) -> int:
        return self.mean_amplitude.shape[1]


@dataclass(frozen=True)
class AdcsMap:
    """Accumulated sign-difference map of one class against all others."""

    target_label: str
    values: np.ndarray
    class_count: int

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.int64, copy=True)
        if vals.ndim != 2:
            raise ValidationError("map values must be 2-D")
        bound = self.class_count - 1
        if vals.min() < -bound or vals.max() > bound:
            raise ValidationError(
                f"map values must lie in [{-bound}, {bound}] for {self.class_count} classes"
            )
        object.__setattr__(self, "values", vals)


def class_mean_spectrum(
    images: Sequence[ImageBuffer], label: str, apply_window: bool = False
) -> ClassSpectrum:
    """Mean of the images' amplitude spectra.

    Per-bin amplitudes are accumulated in sorted order, so the result is
    bit-identical under any reordering of the input images.
    """
    if len(images) == 0:
        raise ValidationError(f"class '{label}' has no images")
    shape = (images[0].height, images[0].width)
    for im in images[1:]:
        if (im.height, im.width) != shape:
            raise ShapeError(
                f"class '{label}' mixes image sizes {shape} and {(im.height, im.width)}"
            )
    stack = np.stack(
        [np.abs(forward_spectrum(im, apply_window).bins) for im in images]
    )
    stack.sort(axis=0)
    total = np.zeros(shape, dtype=np.float64)
    for layer in stack:
        total += layer
    return ClassSpectrum(label, total / len(images), len(images), bool(apply_window))


def adcs_map(target: ClassSpectrum, others: Sequence[ClassSpectrum]) -> AdcsMap:
    """Sum of sign(target - other) over every other class, per bin.

    sign(0) counts as 0, so exactly tied bins stay neutral.
    """
    if len(others) == 0:
        raise ValidationError(
            f"class '{target.label}' has nothing to compare against"
        )
    shape = target.mean_amplitude.shape
    counts = [target.sample_count]
    acc = np.zeros(shape, dtype=np.int64)
    for other in others:
        if other.label == target.label:
            raise ValidationError(
                f"target class '{target.label}' also appears in the comparison set"
            )
        if other.mean_amplitude.shape != shape:
            raise ShapeError(
                f"class '{other.label}' spectrum shape {other.mean_amplitude.shape} "
                f"does not match target {shape}"
            )
        counts.append(other.sample_count)
        acc += np.sign(target.mean_amplitude - other.mean_amplitude).astype(np.int64)
    if max(counts) > SIZE_IMBALANCE_FACTOR * min(counts):
        warnings.warn(
            f"class sizes differ by more than {SIZE_IMBALANCE_FACTOR:g}x "
            f"(min {min(counts)}, max {max(counts)}); per-class means are still "
            "normalized but the comparison may be dominated by sampling noise",
            stacklevel=2,
        )
    return AdcsMap(target.label, acc, 1 + len(others))


def adcs_sidecar(
    result: AdcsMap, spectra: Sequence[ClassSpectrum], windowed: bool
) -> dict:
    """JSON-ready metadata written next to an exported map."""
    return {
        "target_label": result.target_label,
        "class_count": result.class_count,
        "window_flag": bool(windowed),
        "sample_counts": {s.label: s.sample_count for s in spectra},
    }
