"""Command-line front end for reproducible file-to-file runs.

Exit taxonomy: 0 success, 1 validation problems (bad flags, degenerate
inputs, unknown subcommand), 2 I/O and parse failures. Diagnostics go to
stderr; data goes to files or stdout. Every file-writing run drops a JSON
copy of its effective configuration next to its outputs, and re-running an
identical configuration reproduces every output byte for byte.

``SPECTOOL_THREADS`` caps per-file parallelism (default 1); results are
collected in input order, so thread count never changes the output.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .adcs import adcs_map, adcs_sidecar, class_mean_spectrum
from .dataio import encode_like, parse_manifest, read_array, sniff_format, write_array
from .errors import ParseError, ValidationError
from .priority import GradientSet, PriorityTrace, alignment_score, priority_trace
from .shortcuts import CorruptionSpec, apply_corruption, plan_corruption
from .spectral import ImageBuffer, forward_spectrum, radial_density
from .svg import render_density_svg
from .whitening import record_sidecar, whiten

USAGE = """\
usage: spectool <command> [flags]

commands:
  psd       radial spectrum density of one image -> CSV (optional SVG)
  adcs      class-wise spectrum statistic for one target class -> npy + JSON
  whiten    flatten an image's amplitude spectrum, restore its moments
  corrupt   plan (and with --out, apply) dataset corruption from a manifest
  priority  per-epoch gradient-density trace -> CSV matrix (optional SVG)
  compare   cosine alignment between two density CSVs

flags:
  --input PATH        input file (repeat for compare's two densities)
  --manifest PATH     dataset manifest CSV (path,label,split)
  --out PATH          output file or directory
  --kind NAME         corruption kind: lowpass | photon
  --size F            lowpass filter size, fraction of width in (0, 1]
  --photon-scale F    photon budget at intensity 1.0 (default 255)
  --fraction F        share of the target class to corrupt, in [0, 1]
  --label NAME        target class label
  --split NAME        split: train | test-iid | test-ood
  --seed N            corruption seed (default 0)
  --svg PATH          also render an SVG plot to this path
  --window            apply the Hann window before transforming
  --normalize         max-normalize density output
  --power             bucket squared amplitudes instead of amplitudes
"""

_VALUE_FLAGS = {
    "--input": "input",
    "--manifest": "manifest",
    "--out": "out",
    "--kind": "kind",
    "--size": "size",
    "--photon-scale": "photon_scale",
    "--fraction": "fraction",
    "--label": "label",
    "--split": "split",
    "--seed": "seed",
    "--svg": "svg",
}
_SWITCH_FLAGS = {"--window": "window", "--normalize": "normalize", "--power": "power"}


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


def dispatch(argv: list[str]) -> int:
    """Route a token list to a subcommand and map errors to exit codes."""
    try:
        if not argv:
            sys.stderr.write(USAGE)
            return 1
        command, *rest = argv
        handler = _COMMANDS.get(command)
        if handler is None:
            sys.stderr.write(f"error: unknown command {command!r}\n\n")
            sys.stderr.write(USAGE)
            return 1
        return handler(_parse_flags(command, rest))
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (ParseError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def _parse_flags(command: str, tokens: list[str]) -> dict:
    opts: dict = {"input": [], "window": False, "normalize": False, "power": False}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token in _SWITCH_FLAGS:
            opts[_SWITCH_FLAGS[token]] = True
            i += 1
            continue
        if token in _VALUE_FLAGS:
            if i + 1 >= len(tokens):
                raise ValidationError(f"flag {token} needs a value")
            name = _VALUE_FLAGS[token]
            value = tokens[i + 1]
            if name == "input":
                opts["input"].append(value)
            elif name in opts:
                raise ValidationError(f"flag {token} given twice")
            else:
                opts[name] = value
            i += 2
            continue
        raise ValidationError(f"unknown flag {token!r} for command {command!r}")
    return opts


def _require(opts: dict, name: str, flag: str):
    value = opts.get(name)
    if value is None or value == []:
        raise ValidationError(f"missing required flag {flag}")
    return value


def _one_input(opts: dict) -> str:
    inputs = _require(opts, "input", "--input")
    if len(inputs) != 1:
        raise ValidationError(f"expected exactly one --input, got {len(inputs)}")
    return inputs[0]


def _float_flag(opts: dict, name: str, flag: str):
    raw = opts.get(name)
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(f"flag {flag} needs a number, got {raw!r}") from None


def _int_flag(opts: dict, name: str, flag: str, default: int) -> int:
    raw = opts.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"flag {flag} needs an integer, got {raw!r}") from None


def _thread_cap() -> int:
    raw = os.environ.get("SPECTOOL_THREADS")
    if raw is None or not raw.strip():
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError(f"SPECTOOL_THREADS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValidationError(f"SPECTOOL_THREADS must be at least 1, got {cap}")
    return cap


def _map_ordered(fn, items: list):
    """Apply fn to items, optionally threaded, preserving input order."""
    workers = min(_thread_cap(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _json_text(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _write_config(path: Path, command: str, flags: dict) -> None:
    path.write_text(_json_text({"command": command, "flags": flags}), encoding="utf-8")


def _density_csv(bands: np.ndarray) -> str:
    lines = ["band,value"]
    lines.extend(f"{i},{float(v)!r}" for i, v in enumerate(bands))
    return "\n".join(lines) + "\n"


def _load_density_csv(path: Path) -> np.ndarray:
    values: list[float] = []
    lines = path.read_text(encoding="utf-8").split("\n")
    header_seen = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        if not header_seen:
            if line != "band,value":
                raise ParseError(f"{path}: line {lineno}: expected header 'band,value'")
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise ParseError(f"{path}: line {lineno}: expected 2 fields")
        try:
            band = int(fields[0])
            value = float(fields[1])
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from None
        if band != len(values):
            raise ParseError(
                f"{path}: line {lineno}: band indices must run 0, 1, ... got {band}"
            )
        values.append(value)
    if not values:
        raise ParseError(f"{path}: no density rows")
    return np.array(values, dtype=np.float64)


def _trace_csv(trace: PriorityTrace) -> str:
    header = "epoch," + ",".join(str(b) for b in range(trace.band_count))
    lines = [header]
    for epoch, row in zip(trace.epochs, trace.matrix):
        lines.append(f"{epoch}," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _cmd_psd(opts: dict) -> int:
    in_path = Path(_one_input(opts))
    out_path = Path(_require(opts, "out", "--out"))
    image = read_array(in_path.read_bytes())
    density = radial_density(
        forward_spectrum(image, opts["window"]),
        normalize=opts["normalize"],
        power=opts["power"],
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(_density_csv(density.bands), encoding="utf-8")
    if opts.get("svg"):
        Path(opts["svg"]).write_text(render_density_svg(density), encoding="utf-8")
    _write_config(
        out_path.with_name(out_path.name + ".config.json"),
        "psd",
        {
            "input": str(in_path),
            "out": str(out_path),
            "svg": opts.get("svg"),
            "window": opts["window"],
            "normalize": opts["normalize"],
            "power": opts["power"],
            "source_width": density.source_width,
            "source_height": density.source_height,
        },
    )
    return 0


def _cmd_adcs(opts: dict) -> int:
    manifest_path = Path(_require(opts, "manifest", "--manifest"))
    label = _require(opts, "label", "--label")
    out_dir = Path(_require(opts, "out", "--out"))
    split = opts.get("split", "train")
    manifest = parse_manifest(manifest_path.read_text(encoding="utf-8"))
    chosen = manifest.in_split(split)
    if not chosen:
        raise ValidationError(f"no samples in split {split!r}")
    by_label: dict[str, list[str]] = {}
    for entry in chosen:
        by_label.setdefault(entry.label, []).append(entry.path)
    if label not in by_label:
        raise ValidationError(f"no samples of class {label!r} in split {split!r}")

    root = manifest_path.parent

    def load_class(item):
        class_label, paths = item
        images = [read_array((root / p).read_bytes()) for p in paths]
        return class_mean_spectrum(images, class_label, opts["window"])

    ordered = sorted(by_label.items())
    spectra = _map_ordered(load_class, ordered)
    by_name = {s.label: s for s in spectra}
    target = by_name.pop(label)
    others = [by_name[l] for l in sorted(by_name)]
    result = adcs_map(target, others)

    out_dir.mkdir(parents=True, exist_ok=True)
    safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in label)
    array_path = out_dir / f"adcs_{safe}.npy"
    array_path.write_bytes(
        write_array(ImageBuffer(result.values.astype(np.float64)), "float64")
    )
    (out_dir / f"adcs_{safe}.json").write_text(
        _json_text(adcs_sidecar(result, spectra, opts["window"])), encoding="utf-8"
    )
    _write_config(
        out_dir / "config.json",
        "adcs",
        {
            "manifest": str(manifest_path),
            "label": label,
            "split": split,
            "out": str(out_dir),
            "window": opts["window"],
        },
    )
    return 0


def _cmd_whiten(opts: dict) -> int:
    in_path = Path(_one_input(opts))
    data = in_path.read_bytes()
    fmt = sniff_format(data)
    image = read_array(data)
    result, record = whiten(image)
    out_path = in_path.with_name(in_path.stem + ".whitened" + in_path.suffix)
    out_path.write_bytes(encode_like(result, fmt))
    sidecar = in_path.with_name(in_path.stem + ".whitened.json")
    sidecar.write_text(_json_text(record_sidecar(record)), encoding="utf-8")
    _write_config(
        in_path.with_name(in_path.stem + ".whitened.config.json"),
        "whiten",
        {"input": str(in_path), "out": str(out_path)},
    )
    return 0


def _plan_csv(plan) -> str:
    lines = ["path,corrupted"]
    lines.extend(f"{path},{'true' if marked else 'false'}" for path, marked in plan.entries)
    return "\n".join(lines) + "\n"


def _cmd_corrupt(opts: dict) -> int:
    manifest_path = Path(_require(opts, "manifest", "--manifest"))
    kind = _require(opts, "kind", "--kind")
    label = _require(opts, "label", "--label")
    split = _require(opts, "split", "--split")
    fraction = _float_flag(opts, "fraction", "--fraction")
    if fraction is None:
        raise ValidationError("missing required flag --fraction")
    seed = _int_flag(opts, "seed", "--seed", default=0)
    spec = CorruptionSpec(
        kind=kind,
        target_label=label,
        fraction=fraction,
        seed=seed,
        size=_float_flag(opts, "size", "--size"),
        photon_scale=_float_flag(opts, "photon_scale", "--photon-scale"),
    )
    manifest = parse_manifest(manifest_path.read_text(encoding="utf-8"))
    plan = plan_corruption(manifest, spec, split)

    if opts.get("out") is None:
        sys.stdout.write(_plan_csv(plan))
        return 0

    out_dir = Path(opts["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    root = manifest_path.parent

    def process(entry):
        rel_path, marked = entry
        data = (root / rel_path).read_bytes()
        if not marked:
            return rel_path, data
        image = read_array(data)
        corrupted = apply_corruption(image, spec)
        return rel_path, encode_like(corrupted, sniff_format(data))

    for rel_path, payload in _map_ordered(process, list(plan.entries)):
        dest = out_dir / rel_path
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_bytes(payload)
    (out_dir / "plan.csv").write_text(_plan_csv(plan), encoding="utf-8")
    (out_dir / "spec.json").write_text(
        _json_text(
            {
                "kind": spec.kind,
                "target_label": spec.target_label,
                "fraction": spec.fraction,
                "seed": spec.seed,
                "size": spec.size,
                "photon_scale": spec.photon_scale,
                "split": split,
            }
        ),
        encoding="utf-8",
    )
    _write_config(
        out_dir / "config.json",
        "corrupt",
        {
            "manifest": str(manifest_path),
            "kind": kind,
            "label": label,
            "split": split,
            "fraction": fraction,
            "seed": seed,
            "size": spec.size,
            "photon_scale": spec.photon_scale,
            "out": str(out_dir),
        },
    )
    return 0


def _cmd_priority(opts: dict) -> int:
    index_path = Path(_one_input(opts))
    out_path = Path(_require(opts, "out", "--out"))
    gset = GradientSet.load(index_path)
    trace = priority_trace(gset, opts["window"])
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(_trace_csv(trace), encoding="utf-8")
    if opts.get("svg"):
        Path(opts["svg"]).write_text(render_density_svg(trace), encoding="utf-8")
    _write_config(
        out_path.with_name(out_path.name + ".config.json"),
        "priority",
        {
            "input": str(index_path),
            "out": str(out_path),
            "svg": opts.get("svg"),
            "window": opts["window"],
            "normalization": "global-max",
            "source_width": trace.source_width,
            "source_height": trace.source_height,
            "epochs": list(trace.epochs),
            "bands": trace.band_count,
        },
    )
    return 0


def _cmd_compare(opts: dict) -> int:
    inputs = _require(opts, "input", "--input")
    if len(inputs) != 2:
        raise ValidationError(f"compare needs exactly two --input densities, got {len(inputs)}")
    first = _load_density_csv(Path(inputs[0]))
    second = _load_density_csv(Path(inputs[1]))
    score = alignment_score(first, second)
    sys.stdout.write(f"{score!r}\n")
    if opts.get("out"):
        out_path = Path(opts["out"])
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(
            _json_text({"score": score, "inputs": [str(p) for p in inputs]}),
            encoding="utf-8",
        )
        _write_config(
            out_path.with_name(out_path.name + ".config.json"),
            "compare",
            {"input": [str(p) for p in inputs], "out": str(out_path)},
        )
    return 0


_COMMANDS = {
    "psd": _cmd_psd,
    "adcs": _cmd_adcs,
    "whiten": _cmd_whiten,
    "corrupt": _cmd_corrupt,
    "priority": _cmd_priority,
    "compare": _cmd_compare,
}
