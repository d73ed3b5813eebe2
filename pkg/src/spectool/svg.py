"""Self-contained deterministic SVG plots.

A density renders as a single polyline over labeled band indices; a trace
renders as a grayscale heatmap (dark = high) with epoch and band axes. The
output is plain text built with fixed formatting, so identical inputs give
byte-identical files, which makes golden tests trivial.
"""

from __future__ import annotations

from .errors import ValidationError
from .priority import PriorityTrace
from .spectral import RadialDensity

_WIDTH, _HEIGHT = 640, 400
_LEFT, _RIGHT, _TOP, _BOTTOM = 56, 16, 16, 44

_STYLE = (
    '<style>text{font-family:monospace;font-size:11px;fill:#333}'
    ".axis{stroke:#333;stroke-width:1}"
    ".curve{fill:none;stroke:#1f6fb2;stroke-width:1.5}</style>"
)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _open_svg() -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        _STYLE,
    ]


def _axes(parts: list[str], x_label: str, y_label: str) -> None:
    x0, y0 = _LEFT, _HEIGHT - _BOTTOM
    parts.append(
        f'<line class="axis" x1="{x0}" y1="{_TOP}" x2="{x0}" y2="{y0}"/>'
    )
    parts.append(
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{_WIDTH - _RIGHT}" y2="{y0}"/>'
    )
    parts.append(
        f'<text x="{(_LEFT + _WIDTH - _RIGHT) // 2}" y="{_HEIGHT - 8}" '
        f'text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{(_TOP + y0) // 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(_TOP + y0) // 2})">{y_label}</text>'
    )


def _tick_indices(count: int, most: int = 10) -> list[int]:
    if count <= most:
        return list(range(count))
    step = (count - 1) / (most - 1)
    return sorted({int(round(i * step)) for i in range(most)})


def render_density_svg(data: RadialDensity | PriorityTrace) -> str:
    """Render a density polyline or a trace heatmap as SVG text."""
    if isinstance(data, RadialDensity):
        return _density_svg(data)
    if isinstance(data, PriorityTrace):
        return _trace_svg(data)
    raise ValidationError(
        f"cannot render a {type(data).__name__}; expected a density or a trace"
    )


def _density_svg(density: RadialDensity) -> str:
    bands = density.bands
    if bands.size == 0:
        raise ValidationError("cannot render an empty density")
    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM
    top = float(bands.max())
    scale = top if top > 0.0 else 1.0
    span = max(bands.size - 1, 1)

    points = []
    for b, value in enumerate(bands):
        x = _LEFT + plot_w * (b / span)
        y = _HEIGHT - _BOTTOM - plot_h * (float(value) / scale)
        points.append(f"{_fmt(x)},{_fmt(y)}")

    parts = _open_svg()
    _axes(parts, "band", "amplitude")
    for b in _tick_indices(bands.size):
        x = _LEFT + plot_w * (b / span)
        parts.append(
            f'<line class="axis" x1="{_fmt(x)}" y1="{_HEIGHT - _BOTTOM}" '
            f'x2="{_fmt(x)}" y2="{_HEIGHT - _BOTTOM + 4}"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_HEIGHT - _BOTTOM + 16}" '
            f'text-anchor="middle">{b}</text>'
        )
    for frac in (0.0, 0.5, 1.0):
        y = _HEIGHT - _BOTTOM - plot_h * frac
        parts.append(
            f'<text x="{_LEFT - 6}" y="{_fmt(y + 4)}" '
            f'text-anchor="end">{top * frac:.3g}</text>'
        )
    parts.append(f'<polyline class="curve" points="{" ".join(points)}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _gray_fill(value: float) -> str:
    lum = int(round((1.0 - value) * 255.0))
    return f"#{lum:02x}{lum:02x}{lum:02x}"


def _trace_svg(trace: PriorityTrace) -> str:
    matrix = trace.matrix
    if matrix.size == 0:
        raise ValidationError("cannot render an empty trace")
    rows, cols = matrix.shape
    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM
    cell_w = plot_w / cols
    cell_h = plot_h / rows

    parts = _open_svg()
    _axes(parts, "band", "epoch")
    for r in range(rows):
        for c in range(cols):
            x = _LEFT + c * cell_w
            y = _TOP + r * cell_h
            parts.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(cell_w)}" '
                f'height="{_fmt(cell_h)}" fill="{_gray_fill(float(matrix[r, c]))}"/>'
            )
    for c in _tick_indices(cols):
        x = _LEFT + (c + 0.5) * cell_w
        parts.append(
            f'<text x="{_fmt(x)}" y="{_HEIGHT - _BOTTOM + 16}" '
            f'text-anchor="middle">{c}</text>'
        )
    for r in _tick_indices(rows):
        y = _TOP + (r + 0.5) * cell_h
        parts.append(
            f'<text x="{_LEFT - 6}" y="{_fmt(y + 4)}" '
            f'text-anchor="end">{trace.epochs[r]}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
