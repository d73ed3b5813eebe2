import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectool import (
    ImageBuffer,
    NonRealResultError,
    SpectrumMap,
    ValidationError,
    band_count,
    forward_spectrum,
    hann_window_2d,
    inverse_image,
    radial_density,
)


def bucket_oracle(values: np.ndarray) -> np.ndarray:
    """Independent radial bucketing: plain double loop, written before the
    library implementation and kept free of it."""
    h, w = values.shape
    nbands = min(h, w) // 2 + 1
    sums = [0.0] * nbands
    counts = [0] * nbands
    for i in range(h):
        for j in range(w):
            r = math.sqrt((i - h // 2) ** 2 + (j - w // 2) ** 2)
            band = int(math.floor(r + 0.5))
            if band < nbands:
                sums[band] += float(values[i, j])
                counts[band] += 1
    return np.array([s / c if c else 0.0 for s, c in zip(sums, counts)])


class TestHannWindow:
    def test_3x3_center_one_edges_zero(self):
        weights = hann_window_2d(3, 3).weights
        assert weights[1, 1] == 1.0
        edges = np.concatenate([weights[0], weights[2], weights[:, 0], weights[:, 2]])
        assert (edges == 0.0).all()

    def test_2x2_all_zero(self):
        assert (hann_window_2d(2, 2).weights == 0.0).all()

    def test_5x4_interior_value(self):
        # h_5(2) * h_4(1) = 1.0 * 0.75, at column 2 of row 1
        weights = hann_window_2d(5, 4).weights
        assert weights.shape == (4, 5)
        assert weights[1, 2] == pytest.approx(0.75, abs=1e-12)

    @pytest.mark.parametrize("width,height", [(1, 5), (5, 1), (0, 4), (4, 1)])
    def test_degenerate_dimensions_rejected(self, width, height):
        with pytest.raises(ValidationError):
            hann_window_2d(width, height)

    def test_weights_within_unit_interval(self):
        weights = hann_window_2d(9, 7).weights
        assert weights.min() >= 0.0 and weights.max() <= 1.0


class TestForwardSpectrum:
    def test_constant_image_is_pure_dc(self):
        spectrum = forward_spectrum(ImageBuffer(np.ones((4, 4))))
        amp = spectrum.amplitude
        assert amp[2, 2] == pytest.approx(16.0, abs=1e-9)
        amp[2, 2] = 0.0
        assert amp.max() < 1e-9

    def test_impulse_is_flat(self):
        pixels = np.zeros((4, 4))
        pixels[0, 0] = 1.0
        amp = forward_spectrum(ImageBuffer(pixels)).amplitude
        assert np.allclose(amp, 1.0, atol=1e-12)

    def test_cosine_hits_two_bins(self):
        j = np.arange(8, dtype=np.float64)
        pixels = np.tile(np.cos(2.0 * np.pi * j / 8.0), (8, 1))
        amp = forward_spectrum(ImageBuffer(pixels)).amplitude
        assert amp[4, 5] == pytest.approx(32.0, abs=1e-9)
        assert amp[4, 3] == pytest.approx(32.0, abs=1e-9)
        amp[4, 5] = amp[4, 3] = 0.0
        assert amp.max() < 1e-9

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            ImageBuffer(np.array([[1.0, np.nan], [0.0, 0.0]]))

    def test_window_requires_two_pixels_per_axis(self):
        image = ImageBuffer(np.ones((1, 8)))
        with pytest.raises(ValidationError):
            forward_spectrum(image, apply_window=True)


class TestInverseImage:
    def test_round_trip_identity(self):
        rng = np.random.default_rng(7)
        pixels = rng.random((12, 9))
        back = inverse_image(forward_spectrum(ImageBuffer(pixels)))
        assert np.abs(back.pixels - pixels).max() < 1e-9

    def test_dc_only_gives_constant(self):
        bins = np.zeros((4, 4), dtype=complex)
        bins[2, 2] = 16.0
        image = inverse_image(SpectrumMap(bins))
        assert np.allclose(image.pixels, 1.0, atol=1e-12)

    def test_asymmetric_edit_rejected(self):
        rng = np.random.default_rng(8)
        spectrum = forward_spectrum(ImageBuffer(rng.random((8, 8))))
        bins = spectrum.bins.copy()
        bins[1, 2] += 1.0
        with pytest.raises(NonRealResultError):
            inverse_image(SpectrumMap(bins))


class TestRadialDensity:
    def test_dc_only(self):
        spectrum = forward_spectrum(ImageBuffer(np.full((8, 8), 0.5)))
        bands = radial_density(spectrum).bands
        assert bands[0] == pytest.approx(32.0, abs=1e-9)
        assert np.abs(bands[1:]).max() < 1e-9

    def test_flat_spectrum_all_ones(self):
        pixels = np.zeros((8, 8))
        pixels[0, 0] = 1.0
        spectrum = forward_spectrum(ImageBuffer(pixels))
        assert np.allclose(radial_density(spectrum).bands, 1.0, atol=1e-12)
        assert np.allclose(radial_density(spectrum, normalize=True).bands, 1.0, atol=1e-12)

    def test_matches_bucket_oracle(self):
        rng = np.random.default_rng(3)
        spectrum = SpectrumMap(rng.random((8, 8)) + 1j * rng.random((8, 8)))
        assert np.array_equal(radial_density(spectrum).bands, bucket_oracle(spectrum.amplitude))

    @given(
        width=st.integers(min_value=1, max_value=16),
        height=st.integers(min_value=1, max_value=16),
        seed=st.integers(min_value=0, max_value=2**31),
    )
    @settings(max_examples=60, deadline=None)
    def test_oracle_equality_all_sizes(self, width, height, seed):
        rng = np.random.default_rng(seed)
        spectrum = SpectrumMap(
            rng.random((height, width)) + 1j * rng.random((height, width))
        )
        assert np.array_equal(
            radial_density(spectrum).bands, bucket_oracle(spectrum.amplitude)
        )

    def test_band_count_uses_smaller_dimension(self):
        assert band_count(16, 16) == 9
        assert band_count(5, 4) == 3
        assert band_count(4, 16) == 3

    def test_normalized_peak_is_one(self):
        rng = np.random.default_rng(11)
        spectrum = forward_spectrum(ImageBuffer(rng.random((10, 10))))
        bands = radial_density(spectrum, normalize=True).bands
        assert bands.max() == pytest.approx(1.0, abs=0.0)

    def test_power_mode_buckets_squares(self):
        rng = np.random.default_rng(12)
        spectrum = forward_spectrum(ImageBuffer(rng.random((8, 8))))
        power = radial_density(spectrum, power=True).bands
        assert np.array_equal(power, bucket_oracle(spectrum.amplitude**2))


class TestTransformInvariants:
    @given(seed=st.integers(min_value=0, max_value=2**31))
    @settings(max_examples=40, deadline=None)
    def test_parseval(self, seed):
        rng = np.random.default_rng(seed)
        pixels = rng.random((16, 16))
        spectrum = forward_spectrum(ImageBuffer(pixels))
        spectral_energy = float(np.sum(spectrum.amplitude**2))
        spatial_energy = 16 * 16 * float(np.sum(pixels**2))
        assert abs(spectral_energy - spatial_energy) < 1e-9 * spatial_energy

    @pytest.mark.parametrize("shape", [(7, 7), (8, 8), (9, 6), (6, 9)])
    def test_conjugate_symmetry(self, shape):
        rng = np.random.default_rng(5)
        amp = forward_spectrum(ImageBuffer(rng.random(shape))).amplitude
        h, w = shape
        ch, cw = h // 2, w // 2
        for i in range(h):
            mi = 2 * ch - i
            if not 0 <= mi < h:
                continue  # unmatched Nyquist row on even sizes
            for j in range(w):
                mj = 2 * cw - j
                if not 0 <= mj < w:
                    continue
                assert abs(amp[i, j] - amp[mi, mj]) <= 1e-12 * max(amp[i, j], 1e-300)

    def test_linearity(self):
        rng = np.random.default_rng(6)
        x = rng.random((16, 16))
        y = rng.random((16, 16))
        a, b = 1.7, -0.6
        combined = forward_spectrum(ImageBuffer(a * x + b * y)).bins
        separate = a * forward_spectrum(ImageBuffer(x)).bins + b * forward_spectrum(
            ImageBuffer(y)
        ).bins
        assert np.abs(combined - separate).max() < 1e-9

    def test_window_reduces_leakage(self):
        size = 64
        j = np.arange(size, dtype=np.float64)
        pixels = np.tile(np.cos(2.0 * np.pi * 10.5 * j / size), (size, 1))
        image = ImageBuffer(pixels)

        def outside_fraction(windowed: bool) -> float:
            amp2 = forward_spectrum(image, apply_window=windowed).amplitude ** 2
            dv = np.arange(size) - size // 2
            du = np.arange(size) - size // 2
            band = np.floor(np.sqrt(dv[:, None] ** 2 + du[None, :] ** 2) + 0.5)
            inside = (band >= 9) & (band <= 12)
            return float(amp2[~inside].sum() / amp2.sum())

        assert outside_fraction(True) < outside_fraction(False)
