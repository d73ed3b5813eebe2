"""Learning-priority analysis over externally produced gradient dumps.

Gradient maps back-propagated to the input are read from an indexed
directory, turned into radial densities per epoch, and stacked into a
trace whose rows show which frequency bands dominate the loss over time.
The alignment score compares one density against another (say, a shortcut
signature against a model's error density) as cosine similarity on
DC-excluded, max-normalized band vectors: bounded, scale-free, and
argmax-compatible.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataio import read_array
from .errors import ParseError, ShapeError, ValidationError
from .spectral import ImageBuffer, RadialDensity, forward_spectrum, radial_density

INDEX_HEADER = "epoch,sample_id,path"


@dataclass(frozen=True)
class GradientSample:
    epoch: int
    sample_id: str
    path: str


@dataclass(frozen=True)
class GradientSet:
    """An indexed directory of per-epoch, per-sample gradient arrays."""

    root: Path
    samples: tuple[GradientSample, ...]

    def __post_init__(self):
        if not self.samples:
            raise ValidationError("gradient set has no samples")
        object.__setattr__(self, "root", Path(self.root))

    def epochs(self) -> tuple[int, ...]:
        return tuple(sorted({s.epoch for s in self.samples}))

    def for_epoch(self, epoch: int) -> tuple[GradientSample, ...]:
        chosen = [s for s in self.samples if s.epoch == epoch]
        chosen.sort(key=lambda s: s.sample_id)
        return tuple(chosen)

    @classmethod
    def load(cls, index_path: str | Path) -> "GradientSet":
        index_path = Path(index_path)
        samples = parse_gradient_index(index_path.read_text(encoding="utf-8"))
        return cls(index_path.parent, samples)


@dataclass(frozen=True)
class PriorityTrace:
    """Rows = epochs in ascending order, columns = radial bands, values
    globally max-normalized to [0, 1]."""

    epochs: tuple[int, ...]
    matrix: np.ndarray
    source_width: int = 0
    source_height: int = 0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64, copy=True)
        if m.ndim != 2 or m.shape[0] != len(self.epochs):
            raise ValidationError("trace matrix must have one row per epoch")
        if not np.isfinite(m).all() or m.min() < 0.0 or m.max() > 1.0:
            raise ValidationError("trace values must lie in [0, 1]")
        object.__setattr__(self, "matrix", m)

    @property
    def band_count(self) -> int:
        return self.matrix.shape[1]


def parse_gradient_index(text: str) -> tuple[GradientSample, ...]:
    """Parse an ``epoch,sample_id,path`` CSV index."""
    samples: list[GradientSample] = []
    header_seen = False
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if not header_seen:
            if line != INDEX_HEADER:
                raise ParseError(
                    f"line {lineno}: expected header '{INDEX_HEADER}', got '{line}'"
                )
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 3:
            raise ParseError(
                f"line {lineno}: expected 3 comma-separated fields, got {len(fields)}"
            )
        epoch_text, sample_id, path = fields
        try:
            epoch = int(epoch_text)
        except ValueError:
            raise ParseError(f"line {lineno}: epoch {epoch_text!r} is not an integer") from None
        if epoch < 0:
            raise ParseError(f"line {lineno}: epoch must be non-negative, got {epoch}")
        if not sample_id or not path:
            raise ParseError(f"line {lineno}: empty sample id or path")
        samples.append(GradientSample(epoch, sample_id, path))
    return tuple(samples)


def _load_gradient(gset: GradientSet, sample: GradientSample) -> ImageBuffer:
    return read_array((gset.root / sample.path).read_bytes())


def average_gradient_density(
    gset: GradientSet, epoch: int, apply_window: bool = False
) -> RadialDensity:
    """Mean unnormalized radial density over one epoch's gradient maps,
    accumulated in ascending sample-id order."""
    chosen = gset.for_epoch(epoch)
    if not chosen:
        raise ValidationError(f"no gradient maps for epoch {epoch}")
    shape = None
    total = None
    for sample in chosen:
        image = _load_gradient(gset, sample)
        if shape is None:
            shape = (image.height, image.width)
        elif (image.height, image.width) != shape:
            raise ShapeError(
                f"gradient map {sample.path!r} is {(image.height, image.width)}, "
                f"expected {shape}"
            )
        bands = radial_density(forward_spectrum(image, apply_window)).bands
        total = bands if total is None else total + bands
    return RadialDensity(total / len(chosen), shape[1], shape[0])


def priority_trace(gset: GradientSet, apply_window: bool = False) -> PriorityTrace:
    """Per-epoch density rows, globally normalized so the peak entry is 1.

    Normalization is a pure rescale: per-row argmax bands are unchanged.
    """
    epochs = gset.epochs()
    rows = [average_gradient_density(gset, e, apply_window) for e in epochs]
    widths = {r.bands.size for r in rows}
    if len(widths) != 1:
        raise ShapeError("epochs produced densities of different band counts")
    matrix = np.stack([r.bands for r in rows])
    top = matrix.max()
    if top > 0.0:
        matrix = matrix / top
    return PriorityTrace(epochs, matrix, rows[0].source_width, rows[0].source_height)


def alignment_score(a: RadialDensity | np.ndarray, b: RadialDensity | np.ndarray) -> float:
    """Cosine similarity of two densities after dropping DC and
    max-normalizing each side. Symmetric, scale-invariant, in [-1, 1]."""
    va = np.asarray(getattr(a, "bands", a), dtype=np.float64)
    vb = np.asarray(getattr(b, "bands", b), dtype=np.float64)
    if va.ndim != 1 or vb.ndim != 1 or va.size != vb.size:
        raise ShapeError(
            f"densities must be 1-D with equal band counts, got {va.shape} and {vb.shape}"
        )
    if va.size < 2:
        raise ValidationError("densities need at least one non-DC band")
    va, vb = va[1:], vb[1:]
    peak_a, peak_b = va.max(), vb.max()
    if peak_a <= 0.0 or peak_b <= 0.0:
        raise ValidationError("cannot align an all-zero density")
    va = va / peak_a
    vb = vb / peak_b
    return float((va @ vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))
