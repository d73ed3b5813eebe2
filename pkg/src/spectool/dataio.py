"""On-disk formats: sample manifests, the npy array container, PGM and PNG.

Readers are lenient where the ecosystem is (any npy header padding is
accepted as long as it ends in a newline); the writer emits the canonical
64-byte-aligned form, version 1.0, C order, little-endian, byte for byte
reproducible. PNG goes through Pillow; PGM and the container are parsed
here directly.
"""

from __future__ import annotations

import ast
import io
import struct
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import ParseError, ValidationError
from .spectral import ImageBuffer

SPLITS = ("train", "test-iid", "test-ood")

MANIFEST_HEADER = "path,label,split"

_NPY_MAGIC = b"\x93NUMPY"
_PGM_MAGIC = b"P5"
_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

#: dtypes the array container accepts, descr string to numpy dtype
_DESCRS = {
    "<f4": np.dtype("<f4"),
    "<f8": np.dtype("<f8"),
    "|u1": np.dtype("|u1"),
    "<u2": np.dtype("<u2"),
}
_DTYPE_TO_DESCR = {
    "float32": "<f4",
    "float64": "<f8",
    "uint8": "|u1",
    "uint16": "<u2",
}
_INT_MAX = {"uint8": 255, "uint16": 65535}

_LUMA_R, _LUMA_G, _LUMA_B = 0.2126, 0.7152, 0.0722


@dataclass(frozen=True)
class SampleEntry:
    path: str
    label: str
    split: str


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[SampleEntry, ...]

    def labels(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for e in self.entries:
            seen.setdefault(e.label, None)
        return tuple(seen)

    def in_split(self, split: str) -> tuple[SampleEntry, ...]:
        return tuple(e for e in self.entries if e.split == split)


def parse_manifest(text: str) -> DatasetManifest:
    """Parse a ``path,label,split`` CSV manifest.

    Blank lines and ``#`` comments are ignored, line endings may be LF or
    CRLF. Malformed rows raise :class:`ParseError` naming the physical line;
    duplicate paths raise :class:`ValidationError`.
    """
    entries: list[SampleEntry] = []
    seen_paths: set[str] = set()
    header_seen = False
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if not header_seen:
            if line != MANIFEST_HEADER:
                raise ParseError(
                    f"line {lineno}: expected header '{MANIFEST_HEADER}', got '{line}'"
                )
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 3:
            raise ParseError(
                f"line {lineno}: expected 3 comma-separated fields, got {len(fields)}"
            )
        path, label, split = fields
        if not path or not label:
            raise ParseError(f"line {lineno}: empty path or label")
        if split not in SPLITS:
            raise ParseError(
                f"line {lineno}: unknown split '{split}' (expected one of {', '.join(SPLITS)})"
            )
        if path in seen_paths:
            raise ValidationError(f"duplicate path '{path}' in manifest")
        seen_paths.add(path)
        entries.append(SampleEntry(path, label, split))
    if not header_seen and entries:
        raise ParseError("manifest is missing its header line")
    return DatasetManifest(tuple(entries))


def serialize_manifest(manifest: DatasetManifest) -> str:
    lines = [MANIFEST_HEADER]
    lines.extend(f"{e.path},{e.label},{e.split}" for e in manifest.entries)
    return "\n".join(lines) + "\n"


def read_npy(data: bytes) -> np.ndarray:
    """Decode a version-1.0 npy container into a 1-, 2- or 3-D array."""
    if not data.startswith(_NPY_MAGIC):
        raise ParseError("array container magic mismatch")
    if len(data) < 10:
        raise ParseError("array container shorter than its fixed header")
    major, minor = data[6], data[7]
    if (major, minor) != (1, 0):
        raise ParseError(
            f"array container version {major}.{minor} not supported; "
            "only version 1.0 is accepted"
        )
    (hlen,) = struct.unpack("<H", data[8:10])
    header_end = 10 + hlen
    if len(data) < header_end:
        raise ParseError("truncated payload: header extends past end of data")
    try:
        header_text = data[10:header_end].decode("ascii")
    except UnicodeDecodeError as exc:
        raise ParseError(f"array container header is not ASCII: {exc}") from None
    if not header_text.endswith("\n"):
        raise ParseError("array container header does not end in a newline")
    try:
        header = ast.literal_eval(header_text)
    except (ValueError, SyntaxError) as exc:
        raise ParseError(f"array container header is not a literal dict: {exc}") from None
    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise ParseError(
            "array container header must have exactly the keys descr, fortran_order, shape"
        )
    descr = header["descr"]
    if descr not in _DESCRS:
        raise ParseError(
            f"unsupported dtype descr {descr!r}; accepted: {', '.join(sorted(_DESCRS))}"
        )
    if header["fortran_order"] is not False:
        raise ParseError("fortran_order must be False (C order only)")
    shape = header["shape"]
    if not isinstance(shape, tuple) or not all(isinstance(n, int) for n in shape):
        raise ParseError("shape must be a tuple of integers")
    if len(shape) == 0 or len(shape) > 3:
        raise ParseError(f"arrays must have 1 to 3 dimensions, got {len(shape)}")
    if any(n <= 0 for n in shape):
        raise ParseError(f"shape extents must be positive, got {shape}")
    dtype = _DESCRS[descr]
    expected = dtype.itemsize * int(np.prod(shape))
    payload = data[header_end:]
    if len(payload) < expected:
        raise ParseError(
            f"truncated payload: need {expected} bytes, have {len(payload)}"
        )
    if len(payload) > expected:
        raise ParseError(
            f"trailing data: payload is {len(payload)} bytes, declared {expected}"
        )
    return np.frombuffer(payload, dtype=dtype).reshape(shape)


def write_npy(array: np.ndarray) -> bytes:
    """Encode an array as a canonical version-1.0 container.

    Deterministic byte-for-byte: fixed dict formatting, space padding to a
    64-byte boundary, C order, little-endian."""
    array = np.ascontiguousarray(array)
    descr = _DTYPE_TO_DESCR.get(array.dtype.name)
    if descr is None:
        raise ValidationError(
            f"cannot write dtype {array.dtype.name}; supported: "
            f"{', '.join(_DTYPE_TO_DESCR)}"
        )
    if array.ndim == 0 or array.ndim > 3:
        raise ValidationError(f"arrays must have 1 to 3 dimensions, got {array.ndim}")
    header = (
        f"{{'descr': '{descr}', 'fortran_order': False, "
        f"'shape': {tuple(array.shape)!r}, }}"
    )
    pad = 64 - (10 + len(header) + 1) % 64
    if pad == 64:
        pad = 0
    header_bytes = (header + " " * pad + "\n").encode("ascii")
    return (
        _NPY_MAGIC
        + bytes((1, 0))
        + struct.pack("<H", len(header_bytes))
        + header_bytes
        + array.tobytes(order="C")
    )


def _gray_from_rgb(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    # already-gray inputs must reduce exactly to one channel; the weighted
    # sum is off by an ulp for some values
    if np.array_equal(r, g) and np.array_equal(g, b):
        return r.copy()
    return r * _LUMA_R + g * _LUMA_G + b * _LUMA_B


def _image_from_loaded(arr: np.ndarray) -> ImageBuffer:
    if arr.ndim == 1:
        raise ParseError("expected 2-D image data, got a 1-D array")
    if arr.ndim == 3:
        if arr.shape[2] != 3:
            raise ParseError(
                f"3-D arrays must be (height, width, 3) channels-last, got {arr.shape}"
            )
    if arr.dtype == np.uint8:
        scaled = arr.astype(np.float64) / 255.0
    elif arr.dtype == np.uint16:
        scaled = arr.astype(np.float64) / 65535.0
    else:
        scaled = arr.astype(np.float64)
    if scaled.ndim == 3:
        scaled = _gray_from_rgb(scaled)
    return ImageBuffer(scaled)


def _parse_pgm_header(data: bytes) -> tuple[int, int, int, int]:
    """Return (width, height, maxval, payload offset) of a P5 header."""
    pos = 0

    def next_token() -> bytes:
        nonlocal pos
        while pos < len(data):
            c = data[pos : pos + 1]
            if c == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError("truncated PGM header")
        return data[start:pos]

    if next_token() != b"P5":
        raise ParseError("not a binary PGM (P5) file")
    try:
        width = int(next_token())
        height = int(next_token())
        maxval = int(next_token())
    except ValueError as exc:
        raise ParseError(f"malformed PGM header: {exc}") from None
    if width <= 0 or height <= 0:
        raise ParseError(f"PGM dimensions must be positive, got {width}x{height}")
    if maxval not in (255, 65535):
        raise ParseError(f"PGM maxval must be 255 or 65535, got {maxval}")
    return width, height, maxval, pos + 1  # single whitespace byte after maxval


def _read_pgm(data: bytes) -> ImageBuffer:
    width, height, maxval, offset = _parse_pgm_header(data)
    itemsize = 1 if maxval == 255 else 2
    expected = width * height * itemsize
    payload = data[offset : offset + expected]
    if len(payload) < expected:
        raise ParseError(f"truncated PGM payload: need {expected} bytes, have {len(payload)}")
    dtype = np.uint8 if maxval == 255 else np.dtype(">u2")
    pixels = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return ImageBuffer(pixels.astype(np.float64) / maxval)


def _write_pgm(quantized: np.ndarray, maxval: int) -> bytes:
    height, width = quantized.shape
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    if maxval == 255:
        return header + quantized.astype(np.uint8).tobytes()
    return header + quantized.astype(">u2").tobytes()


def _read_png(data: bytes) -> ImageBuffer:
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except Exception as exc:
        raise ParseError(f"cannot decode PNG: {exc}") from None
    mode = img.mode
    if mode == "L":
        return _image_from_loaded(np.asarray(img, dtype=np.uint8))
    if mode in ("I", "I;16"):
        arr = np.asarray(img).astype(np.uint16)
        return _image_from_loaded(arr)
    if mode == "RGB":
        return _image_from_loaded(np.asarray(img, dtype=np.uint8))
    raise ParseError(
        f"PNG mode {mode!r} not supported; use 8/16-bit grayscale or 8-bit RGB"
    )


def read_array(data: bytes) -> ImageBuffer:
    """Decode an image payload (npy container, PGM, or PNG).

    2-D arrays load directly and 3-D (H, W, 3) arrays reduce to grayscale by
    Rec. 709 luma. Integer rasters rescale to [0, 1] by their dtype maximum;
    float payloads keep their native scale (gradient maps stay unscaled).
    """
    if data.startswith(_NPY_MAGIC):
        return _image_from_loaded(read_npy(data))
    if data.startswith(_PGM_MAGIC):
        return _read_pgm(data)
    if data.startswith(_PNG_MAGIC):
        return _read_png(data)
    raise ParseError("unrecognized image payload (not npy, PGM, or PNG)")


def _quantize_unit(values: np.ndarray, maxval: int, clamp: bool) -> np.ndarray:
    if clamp:
        values = np.clip(values, 0.0, 1.0)
    elif values.min() < 0.0 or values.max() > 1.0:
        raise ValidationError(
            f"values outside [0, 1] (range [{values.min():.6g}, {values.max():.6g}]) "
            "cannot be quantized; export as float or pass clamp=True"
        )
    # round half up, e.g. 0.5 * 255 -> 128
    return np.floor(values * maxval + 0.5)


def write_array(image: ImageBuffer, dtype: str = "float64", clamp: bool = False) -> bytes:
    """Encode an image as an npy container.

    Integer dtypes quantize with round-half-up against the dtype maximum and
    require values in [0, 1]; ``clamp`` clips instead of raising and is the
    single place in the package where clamping may happen. Float exports
    never clamp, so analysis pipelines stay linear; float64 round-trips
    exactly.
    """
    if dtype not in _DTYPE_TO_DESCR:
        raise ValidationError(
            f"unsupported output dtype {dtype!r}; choose from {', '.join(_DTYPE_TO_DESCR)}"
        )
    values = image.pixels
    if dtype in _INT_MAX:
        q = _quantize_unit(values, _INT_MAX[dtype], clamp)
        return write_npy(q.astype(dtype))
    return write_npy(values.astype(dtype))


def sniff_format(data: bytes) -> str:
    """Identify a payload for like-for-like re-encoding: ``npy``, ``pgm8``,
    ``pgm16``, ``png8``, ``png16``, or ``pngrgb``."""
    if data.startswith(_NPY_MAGIC):
        return "npy"
    if data.startswith(_PGM_MAGIC):
        maxval = _parse_pgm_header(data)[2]
        return "pgm16" if maxval == 65535 else "pgm8"
    if data.startswith(_PNG_MAGIC):
        try:
            img = Image.open(io.BytesIO(data))
            mode = img.mode
        except Exception as exc:
            raise ParseError(f"cannot decode PNG: {exc}") from None
        if mode == "L":
            return "png8"
        if mode in ("I", "I;16"):
            return "png16"
        if mode == "RGB":
            return "pngrgb"
        raise ParseError(f"PNG mode {mode!r} not supported")
    raise ParseError("unrecognized image payload (not npy, PGM, or PNG)")


def encode_like(image: ImageBuffer, fmt: str) -> bytes:
    """Re-encode an image in the container style named by :func:`sniff_format`.

    npy stays float64 and unclamped; integer raster formats clamp to [0, 1]
    at this export step (and RGB sources come back as 8-bit grayscale, since
    analysis reduced them to one channel)."""
    if fmt == "npy":
        return write_array(image, "float64")
    if fmt == "pgm8":
        return _write_pgm(_quantize_unit(image.pixels, 255, clamp=True), 255)
    if fmt == "pgm16":
        return _write_pgm(_quantize_unit(image.pixels, 65535, clamp=True), 65535)
    if fmt in ("png8", "pngrgb"):
        q = _quantize_unit(image.pixels, 255, clamp=True).astype(np.uint8)
        buf = io.BytesIO()
        Image.fromarray(q, mode="L").save(buf, format="PNG")
        return buf.getvalue()
    if fmt == "png16":
        q = _quantize_unit(image.pixels, 65535, clamp=True).astype(np.uint16)
        buf = io.BytesIO()
        Image.fromarray(q).save(buf, format="PNG")
        return buf.getvalue()
    raise ValidationError(f"unknown format tag {fmt!r}")
