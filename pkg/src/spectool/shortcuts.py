"""Frequency shortcuts: ideal low-pass blur, photon noise, corruption plans,
and the spectral signature a shortcut leaves behind.

The low-pass filter is a hard circular mask in the centered spectrum with
radius size * width / 2; size 1.0 is the documented identity mode and spares
even the corner bins. Photon noise is scaled Poisson shot noise,
y = Poisson(k * x) / k, sampled on counter-based per-pixel streams so runs
are bit-reproducible and pixel-parallel-safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataio import SPLITS, DatasetManifest
from .errors import ShapeError, ValidationError
from .kernels import poisson_counts
from .rng import (
    TAG_PHOTON,
    TAG_PLAN,
    element_keys,
    mix64,
    mix64_np,
    stream_key,
    unit_float,
    unit_float_np,
)
from .spectral import (
    ImageBuffer,
    RadialDensity,
    SpectrumMap,
    forward_spectrum,
    inverse_image,
    radial_density_from_amplitude,
)

KINDS = ("lowpass", "photon")

#: default photon budget at intensity 1.0 (an 8-bit sensor's worth)
DEFAULT_PHOTON_SCALE = 255.0

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class CorruptionSpec:
    """One shortcut: its kind, parameters, target class and share."""

    kind: str
    target_label: str
    fraction: float
    seed: int
    size: float | None = None
    photon_scale: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"kind must be one of {', '.join(KINDS)}, got {self.kind!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValidationError(f"fraction must lie in [0, 1], got {self.fraction}")
        if self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")
        if self.kind == "lowpass":
            if self.size is None:
                raise ValidationError("lowpass corruption needs a size")
            if not 0.0 < self.size <= 1.0:
                raise ValidationError(f"size must lie in (0, 1], got {self.size}")
            if self.photon_scale is not None:
                raise ValidationError("photon-scale does not apply to lowpass")
        else:
            if self.size is not None:
                raise ValidationError("size does not apply to photon noise")
            scale = DEFAULT_PHOTON_SCALE if self.photon_scale is None else self.photon_scale
            if scale <= 0.0:
                raise ValidationError(f"photon scale must be positive, got {scale}")
            object.__setattr__(self, "photon_scale", float(scale))


@dataclass(frozen=True)
class CorruptionPlan:
    """Deterministic per-sample corruption assignment for one manifest."""

    entries: tuple[tuple[str, bool], ...]
    spec: CorruptionSpec
    split: str
    seed: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "seed", self.spec.seed)

    @property
    def marked(self) -> tuple[str, ...]:
        return tuple(path for path, corrupted in self.entries if corrupted)


def lowpass_corrupt(image: ImageBuffer, size: float) -> ImageBuffer:
    """Ideal circular low-pass: zero every centered bin beyond
    radius size * width / 2, then invert. No clamping; quantization-time
    export handles range."""
    if not 0.0 < size <= 1.0:
        raise ValidationError(f"size must lie in (0, 1], got {size}")
    spectrum = forward_spectrum(image)
    bins = spectrum.bins
    if size < 1.0:
        h, w = bins.shape
        dv = np.arange(h, dtype=np.float64) - h // 2
        du = np.arange(w, dtype=np.float64) - w // 2
        radius = np.sqrt(dv[:, None] ** 2 + du[None, :] ** 2)
        bins = np.where(radius > size * (w / 2.0), 0.0 + 0.0j, bins)
    return inverse_image(SpectrumMap(bins))


def photon_noise_corrupt(image: ImageBuffer, photon_scale: float, seed: int) -> ImageBuffer:
    """Shot noise: per pixel, y = Poisson(k * x) / k on the pixel's own
    counter stream derived from (seed, pixel index)."""
    if photon_scale <= 0.0:
        raise ValidationError(f"photon scale must be positive, got {photon_scale}")
    pixels = image.pixels
    if pixels.min() < 0.0:
        raise ValidationError("photon noise needs non-negative intensities")
    lam = np.ascontiguousarray(photon_scale * pixels.reshape(-1))
    keys = element_keys(seed, TAG_PHOTON, lam.size)
    # shared transcendentals: both kernel backends consume these untouched
    neg_exp = np.exp(-lam)
    u0 = unit_float_np(mix64_np(keys ^ np.uint64(0)))
    u1 = unit_float_np(mix64_np(keys ^ np.uint64(1)))
    zscores = np.sqrt(-2.0 * np.log(u0)) * np.cos(2.0 * np.pi * u1)
    counts = poisson_counts(lam, neg_exp, zscores, keys)
    return ImageBuffer(counts.reshape(pixels.shape).astype(np.float64) / photon_scale)


def plan_corruption(
    manifest: DatasetManifest, spec: CorruptionSpec, split: str
) -> CorruptionPlan:
    """Mark round(fraction * n) of the target class in a split.

    Target samples are path-sorted, shuffled on the seeded stream, and the
    leading round-half-up share is marked; every other sample stays clean.
    Identical inputs give a bitwise identical plan.
    """
    if split not in SPLITS:
        raise ValidationError(f"unknown split {split!r}; expected one of {', '.join(SPLITS)}")
    targets = sorted(
        e.path for e in manifest.entries if e.split == split and e.label == spec.target_label
    )
    if not targets:
        raise ValidationError(
            f"no samples of class {spec.target_label!r} in split {split!r}"
        )
    count = int(np.floor(spec.fraction * len(targets) + 0.5))
    key = stream_key(spec.seed, TAG_PLAN)
    for i in range(len(targets) - 1, 0, -1):
        u = unit_float(mix64(key ^ i))
        j = int(u * (i + 1))
        targets[i], targets[j] = targets[j], targets[i]
    marked = set(targets[:count])
    entries = tuple((e.path, e.path in marked) for e in manifest.entries)
    return CorruptionPlan(entries, spec, split)


def apply_corruption(image: ImageBuffer, spec: CorruptionSpec, seed: int | None = None) -> ImageBuffer:
    """Corrupt one image according to a spec (seed defaults to the spec's)."""
    if spec.kind == "lowpass":
        return lowpass_corrupt(image, spec.size)
    return photon_noise_corrupt(
        image, spec.photon_scale, spec.seed if seed is None else seed
    )


def shortcut_density(
    clean: list[ImageBuffer], corrupted: list[ImageBuffer]
) -> RadialDensity:
    """Spectral signature of a shortcut: the normalized radial density of
    |A_clean - A_corrupted| averaged over aligned image pairs."""
    if len(clean) != len(corrupted) or len(clean) == 0:
        raise ShapeError(
            f"need equally many clean and corrupted images, got {len(clean)} and {len(corrupted)}"
        )
    shape = (clean[0].height, clean[0].width)
    total = None
    for before, after in zip(clean, corrupted):
        if (before.height, before.width) != shape or (after.height, after.width) != shape:
            raise ShapeError("all image pairs must share one size")
        diff = np.abs(
            np.abs(forward_spectrum(before).bins) - np.abs(forward_spectrum(after).bins)
        )
        bands = radial_density_from_amplitude(diff).bands
        total = bands if total is None else total + bands
    mean = total / len(clean)
    top = mean.max()
    if top > 0.0:
        mean = mean / top
    return RadialDensity(mean, shape[1], shape[0], normalized=True)
