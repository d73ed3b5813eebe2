"""Windowed 2-D Fourier analysis and azimuthally averaged radial densities.

Conventions, fixed across the whole package:

* forward transform is the plain unnormalized DFT sum; the inverse carries
  the 1/(W*H) factor, so Parseval reads sum|F|^2 = W*H*sum x^2;
* spectra are DC-centered; on even sizes DC sits at index (H//2, W//2);
* radial band of a bin at centered offset (du, dv) is floor(r + 0.5) with
  r = hypot(du, dv); the highest retained band is min(W, H) // 2 and corner
  bins past it are dropped; band values are means, not sums, so bands with
  different populations stay comparable.

Everything here is a pure function of its arguments and safe to call from
many threads. Batch callers that reduce across images should either keep a
fixed accumulation order or compare at 1e-9 rather than bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonRealResultError, ValidationError
from .kernels import radial_sums

#: inverse transforms reject spectra whose imaginary residue exceeds this
#: fraction of the largest real component
IMAG_RESIDUE_LIMIT = 1e-6


def band_count(width: int, height: int) -> int:
    """Bands of a width-by-height spectrum: DC through the cutoff radius."""
    return min(width, height) // 2 + 1


@dataclass(frozen=True)
class ImageBuffer:
    """Real-valued raster: intensities in [0, 1] for images, unbounded for
    gradient maps. Stored row-major as a (height, width) float64 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.float64, order="C", copy=True)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValidationError(
                f"image must be a 2-D array with positive extents, got shape {px.shape}"
            )
        if not np.isfinite(px).all():
            raise ValidationError("image values must be finite")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def values(self) -> np.ndarray:
        """Row-major flat view, length width*height."""
        return self.pixels.reshape(-1)


@dataclass(frozen=True)
class SpectrumMap:
    """DC-centered complex spectrum of a real image."""

    bins: np.ndarray

    def __post_init__(self):
        b = np.array(self.bins, dtype=np.complex128, order="C", copy=True)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise ValidationError(
                f"spectrum must be a 2-D array with positive extents, got shape {b.shape}"
            )
        if not np.isfinite(b).all():
            raise ValidationError("spectrum bins must be finite")
        object.__setattr__(self, "bins", b)

    @property
    def height(self) -> int:
        return self.bins.shape[0]

    @property
    def width(self) -> int:
        return self.bins.shape[1]

    @property
    def amplitude(self) -> np.ndarray:
        """A(u, v) = |F(u, v)| as a float64 array."""
        return np.abs(self.bins)


@dataclass(frozen=True)
class WindowMask:
    """Separable 2-D Hann taper, zero on the border rows and columns."""

    weights: np.ndarray

    @property
    def height(self) -> int:
        return self.weights.shape[0]

    @property
    def width(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class RadialDensity:
    """Azimuthally averaged amplitude per integer radial band.

    ``bands[b]`` is the mean amplitude over bins whose nearest-integer radius
    is ``b``; band 0 is DC, the last band is the cutoff min(W, H) // 2.
    """

    bands: np.ndarray
    source_width: int
    source_height: int
    normalized: bool = False
    power: bool = False

    def __post_init__(self):
        b = np.array(self.bands, dtype=np.float64, copy=True)
        if b.ndim != 1 or b.size < 1:
            raise ValidationError("density bands must be a non-empty 1-D array")
        if not np.isfinite(b).all() or (b < 0).any():
            raise ValidationError("density bands must be finite and non-negative")
        object.__setattr__(self, "bands", b)


def hann_window_2d(width: int, height: int) -> WindowMask:
    """Separable Hann mask w(i, j) = h_H(i) * h_W(j) with
    h_N(k) = 0.5 * (1 - cos(2*pi*k / (N-1)))."""
    if width < 2 or height < 2:
        raise ValidationError(
            f"window needs both dimensions >= 2, got {width}x{height}"
        )

    def taper(n: int) -> np.ndarray:
        k = np.arange(n, dtype=np.float64)
        return 0.5 * (1.0 - np.cos(2.0 * np.pi * k / (n - 1)))

    return WindowMask(np.outer(taper(height), taper(width)))


def forward_spectrum(image: ImageBuffer, apply_window: bool = False) -> SpectrumMap:
    """Unnormalized forward DFT of an image, DC-centered.

    With ``apply_window`` the image is multiplied by :func:`hann_window_2d`
    first, which suppresses leakage from non-periodic content.
    """
    px = image.pixels
    if apply_window:
        px = px * hann_window_2d(image.width, image.height).weights
    return SpectrumMap(np.fft.fftshift(np.fft.fft2(px)))


def inverse_image(spectrum: SpectrumMap) -> ImageBuffer:
    """Inverse DFT with 1/(W*H) scaling, back to a real image.

    The imaginary residue is discarded only when it is negligible next to
    the real part; anything larger means the spectrum lost its conjugate
    symmetry to an asymmetric edit, and raises.
    """
    out = np.fft.ifft2(np.fft.ifftshift(spectrum.bins))
    residue = float(np.abs(out.imag).max())
    reference = float(np.abs(out.real).max())
    if residue > IMAG_RESIDUE_LIMIT * reference:
        raise NonRealResultError(
            f"inverse transform is not real: max |imag| {residue:.3e} vs "
            f"max |real| {reference:.3e}; spectrum was edited asymmetrically"
        )
    return ImageBuffer(out.real)


def radial_density(
    spectrum: SpectrumMap, normalize: bool = False, power: bool = False
) -> RadialDensity:
    """Azimuthal average of the spectrum's amplitude per integer band.

    ``power`` buckets squared amplitudes instead. ``normalize`` rescales so
    the largest band equals 1 (a no-op on an all-zero spectrum).
    """
    amp = spectrum.amplitude
    if power:
        amp = amp * amp
    bands = _band_means(amp)
    if normalize:
        bands = _max_normalize(bands)
    return RadialDensity(
        bands, spectrum.width, spectrum.height, normalized=bool(normalize), power=bool(power)
    )


def radial_density_from_amplitude(
    amplitude: np.ndarray, normalize: bool = False
) -> RadialDensity:
    """Bucket an arbitrary non-negative DC-centered array, e.g. a spectral
    difference signature, into radial bands."""
    amplitude = np.asarray(amplitude, dtype=np.float64)
    if amplitude.ndim != 2:
        raise ValidationError("amplitude array must be 2-D")
    bands = _band_means(amplitude)
    if normalize:
        bands = _max_normalize(bands)
    return RadialDensity(
        bands, amplitude.shape[1], amplitude.shape[0], normalized=bool(normalize)
    )


def _band_means(amplitude: np.ndarray) -> np.ndarray:
    h, w = amplitude.shape
    nbands = band_count(w, h)
    sums, counts = radial_sums(amplitude, nbands)
    means = np.zeros(nbands, dtype=np.float64)
    populated = counts > 0
    means[populated] = sums[populated] / counts[populated]
    return means


def _max_normalize(bands: np.ndarray) -> np.ndarray:
    top = bands.max()
    if top > 0.0:
        return bands / top
    return bands.copy()
