"""Frequency-shortcut analysis toolkit.

Radial power-spectrum densities of images and gradient maps, class-wise
spectrum statistics, spectrum whitening, deterministic dataset corruption
(ideal low-pass blur and photon noise), and density-alignment scoring,
plus a CLI tying them into reproducible file-to-file runs.
"""

from .adcs import AdcsMap, ClassSpectrum, adcs_map, class_mean_spectrum
from .dataio import (
    DatasetManifest,
    SampleEntry,
    parse_manifest,
    read_array,
    read_npy,
    serialize_manifest,
    write_array,
    write_npy,
)
from .errors import (
    NonRealResultError,
    ParseError,
    ShapeError,
    SpectoolError,
    ValidationError,
)
from .kernels import backend
from .priority import (
    GradientSample,
    GradientSet,
    PriorityTrace,
    alignment_score,
    average_gradient_density,
    priority_trace,
)
from .shortcuts import (
    CorruptionPlan,
    CorruptionSpec,
    lowpass_corrupt,
    photon_noise_corrupt,
    plan_corruption,
    shortcut_density,
)
from .spectral import (
    ImageBuffer,
    RadialDensity,
    SpectrumMap,
    WindowMask,
    band_count,
    forward_spectrum,
    hann_window_2d,
    inverse_image,
    radial_density,
    radial_density_from_amplitude,
)
from .svg import render_density_svg
from .whitening import MomentPair, WhiteningRecord, whiten

__version__ = "0.1.0"

__all__ = [
    "AdcsMap",
    "ClassSpectrum",
    "CorruptionPlan",
    "CorruptionSpec",
    "DatasetManifest",
    "GradientSample",
    "GradientSet",
    "ImageBuffer",
    "MomentPair",
    "NonRealResultError",
    "ParseError",
    "PriorityTrace",
    "RadialDensity",
    "SampleEntry",
    "ShapeError",
    "SpectoolError",
    "SpectrumMap",
    "ValidationError",
    "WhiteningRecord",
    "WindowMask",
    "adcs_map",
    "alignment_score",
    "average_gradient_density",
    "backend",
    "band_count",
    "class_mean_spectrum",
    "forward_spectrum",
    "hann_window_2d",
    "inverse_image",
    "lowpass_corrupt",
    "parse_manifest",
    "photon_noise_corrupt",
    "plan_corruption",
    "priority_trace",
    "radial_density",
    "radial_density_from_amplitude",
    "read_array",
    "read_npy",
    "render_density_svg",
    "serialize_manifest",
    "shortcut_density",
    "whiten",
    "write_array",
    "write_npy",
]
