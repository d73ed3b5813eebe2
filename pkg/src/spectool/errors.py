"""Error taxonomy.

Two families matter to callers: :class:`ValidationError` for semantically
invalid inputs (CLI exit 1) and :class:`ParseError` for malformed on-disk
data (CLI exit 2, alongside OS-level I/O failures).
"""


class SpectoolError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SpectoolError):
    """Invalid parameters or degenerate data: bad flags, constant images,
    all-zero vectors, out-of-range values."""


class ShapeError(ValidationError):
    """Operands whose dimensions do not line up."""


class NonRealResultError(ValidationError):
    """An inverse transform left a significant imaginary part, which means
    the spectrum was edited asymmetrically."""


class ParseError(SpectoolError):
    """Malformed file content: manifests, array containers, rasters."""
