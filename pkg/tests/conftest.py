import numpy as np
import pytest

from spectool import kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # JIT compilation happens once here, outside any timed test body
    kernels.warmup()


@pytest.fixture(scope="session")
def one_over_f():
    """Maker for synthetic natural-statistics images: white noise shaped to
    a 1/r amplitude spectrum, rescaled into [0, 1]."""

    def make(width: int, height: int, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        white = rng.standard_normal((height, width))
        spectrum = np.fft.fftshift(np.fft.fft2(white))
        dv = np.arange(height, dtype=np.float64) - height // 2
        du = np.arange(width, dtype=np.float64) - width // 2
        radius = np.sqrt(dv[:, None] ** 2 + du[None, :] ** 2)
        spectrum = spectrum / np.maximum(radius, 1.0)
        spatial = np.fft.ifft2(np.fft.ifftshift(spectrum)).real
        lo, hi = spatial.min(), spatial.max()
        return (spatial - lo) / (hi - lo)

    return make


@pytest.fixture(scope="session")
def band_sinusoid():
    """Maker for a horizontal sinusoid concentrated at one radial band."""

    def make(width: int, height: int, band: int, offset: float = 0.0) -> np.ndarray:
        j = np.arange(width, dtype=np.float64)
        row = np.cos(2.0 * np.pi * band * j / width)
        return offset + np.tile(row, (height, 1))

    return make
