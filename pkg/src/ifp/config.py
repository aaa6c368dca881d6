"""Scenario and sample-grid file formats.

Scenario files are line-oriented text with three sections::

    [protocol]
    cycles = 10            # required, >= 1
    variant = mixture      # mixture | damping | runwise (default mixture)
    bases = HV,DA,RL       # optional, default all three
    seed = 42              # optional, default 0

    [source]
    kind = poisson         # poisson | thermal (default poisson)
    pairs_per_mode = 10000 # required, mean pairs per pixel per probe state

    [sample]
    width = 2
    height = 2
    pixel = 1.0 0.0 0.0 0.0   # tau d1 d2 d3, repeated width*height times,
    pixel = ...               # row-major (x fastest)

The ``[sample]`` section may instead reference a grid file with
``file = name.sample`` (resolved relative to the scenario file). Grid files
carry their own header::

    width 8
    height 8
    0.6 0.35 -0.35 0.0
    ...                # width*height lines, row-major

``#`` starts a comment anywhere on a line; blank lines are ignored. Parse
and validation failures raise ConfigError carrying the file and line.
"""

import os

from .errors import ConfigError, DomainError, PassivityError
from .polarization import BASES, Diattenuator
from .protocol import SampleModel, ScenarioConfig

__all__ = ["load_scenario", "load_sample_grid"]

_SECTION_KEYS = {
    "protocol": {"cycles", "variant", "bases", "seed"},
    "source": {"kind", "pairs_per_mode"},
    "sample": {"file", "width", "height", "pixel"},
}


def _content_lines(path):
    """Yield (line_number, stripped_content) for meaningful lines."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc}", path=path) from exc
    for lineno, line in enumerate(raw, start=1):
        text = line.split("#", 1)[0].strip()
        if text:
            yield lineno, text


def _parse_pixel_fields(fields, path, lineno):
    if len(fields) != 4:
        raise ConfigError(
            f"expected 4 values (tau d1 d2 d3), got {len(fields)}", path=path, line=lineno
        )
    try:
        tau, d1, d2, d3 = (float(f) for f in fields)
    except ValueError:
        raise ConfigError(f"non-numeric pixel value in {fields}", path=path, line=lineno) from None
    try:
        return Diattenuator(tau, (d1, d2, d3))
    except (DomainError, PassivityError) as exc:
        raise ConfigError(f"invalid pixel: {exc}", path=path, line=lineno) from exc


def load_sample_grid(path):
    """Parse a sample grid file into a SampleModel."""
    width = height = None
    pixels = []
    for lineno, text in _content_lines(path):
        fields = text.split()
        if fields[0] in ("width", "height") and len(fields) == 2:
            try:
                value = int(fields[1])
            except ValueError:
                raise ConfigError(f"{fields[0]} must be an integer", path=path, line=lineno) from None
            if value < 1:
                raise ConfigError(f"{fields[0]} must be >= 1, got {value}", path=path, line=lineno)
            if fields[0] == "width":
                width = value
            else:
                height = value
            continue
        if width is None or height is None:
            raise ConfigError(
                "width and height must appear before pixel rows", path=path, line=lineno
            )
        pixels.append(_parse_pixel_fields(fields, path, lineno))
    if width is None or height is None:
        raise ConfigError("missing width/height header", path=path)
    if len(pixels) != width * height:
        raise ConfigError(
            f"expected {width * height} pixel rows for {width}x{height}, got {len(pixels)}",
            path=path,
        )
    return SampleModel(width, height, tuple(pixels))


def _require(entries, section, key, path):
    if key not in entries[section]:
        raise ConfigError(f"missing required key '{key}' in [{section}]", path=path)
    return entries[section][key]


def _int_value(raw, key, path, lineno, minimum=None):
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw!r}", path=path, line=lineno) from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value}", path=path, line=lineno)
    return value


def load_scenario(path):
    """Parse and validate a scenario file into a ScenarioConfig."""
    entries = {name: {} for name in _SECTION_KEYS}
    pixel_rows = []
    section = None
    for lineno, text in _content_lines(path):
        if text.startswith("[") and text.endswith("]"):
            section = text[1:-1].strip()
            if section not in _SECTION_KEYS:
                raise ConfigError(
                    f"unknown section [{section}], expected one of {sorted(_SECTION_KEYS)}",
                    path=path,
                    line=lineno,
                )
            continue
        if "=" not in text:
            raise ConfigError(f"expected 'key = value', got {text!r}", path=path, line=lineno)
        if section is None:
            raise ConfigError("key outside any [section]", path=path, line=lineno)
        key, _, raw = text.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _SECTION_KEYS[section]:
            raise ConfigError(
                f"unknown key '{key}' in [{section}], expected one of {sorted(_SECTION_KEYS[section])}",
                path=path,
                line=lineno,
            )
        if key == "pixel":
            pixel_rows.append((lineno, raw))
            continue
        if key in entries[section]:
            raise ConfigError(f"duplicate key '{key}' in [{section}]", path=path, line=lineno)
        entries[section][key] = (raw, lineno)

    cycles_raw, cycles_line = _require(entries, "protocol", "cycles", path)
    cycles = _int_value(cycles_raw, "cycles", path, cycles_line, minimum=1)

    variant = "mixture"
    if "variant" in entries["protocol"]:
        raw, lineno = entries["protocol"]["variant"]
        if raw.lower() not in ("mixture", "damping", "runwise"):
            raise ConfigError(
                f"variant must be mixture, damping, or runwise, got {raw!r}", path=path, line=lineno
            )
        variant = raw.lower()

    bases = BASES
    if "bases" in entries["protocol"]:
        raw, lineno = entries["protocol"]["bases"]
        bases = tuple(b.strip() for b in raw.split(",") if b.strip())
        if not bases:
            raise ConfigError("bases must list at least one basis", path=path, line=lineno)
        for b in bases:
            if b not in BASES:
                raise ConfigError(f"unknown basis {b!r}, expected among {BASES}", path=path, line=lineno)
        if len(set(bases)) != len(bases):
            raise ConfigError(f"duplicate basis in {bases}", path=path, line=lineno)

    seed = 0
    if "seed" in entries["protocol"]:
        raw, lineno = entries["protocol"]["seed"]
        seed = _int_value(raw, "seed", path, lineno, minimum=0)

    kind = "poisson"
    if "kind" in entries["source"]:
        raw, lineno = entries["source"]["kind"]
        if raw.lower() not in ("poisson", "thermal"):
            raise ConfigError(f"kind must be poisson or thermal, got {raw!r}", path=path, line=lineno)
        kind = raw.lower()

    pairs_raw, pairs_line = _require(entries, "source", "pairs_per_mode", path)
    try:
        pairs_per_mode = float(pairs_raw)
    except ValueError:
        raise ConfigError(
            f"pairs_per_mode must be a number, got {pairs_raw!r}", path=path, line=pairs_line
        ) from None
    if not pairs_per_mode > 0.0:
        raise ConfigError(
            f"pairs_per_mode must be positive, got {pairs_per_mode}", path=path, line=pairs_line
        )

    if "file" in entries["sample"]:
        if pixel_rows or "width" in entries["sample"] or "height" in entries["sample"]:
            _, lineno = entries["sample"]["file"]
            raise ConfigError(
                "sample 'file' cannot be combined with inline width/height/pixel",
                path=path,
                line=lineno,
            )
        rel, _ = entries["sample"]["file"]
        grid_path = os.path.join(os.path.dirname(os.path.abspath(path)), rel)
        sample = load_sample_grid(grid_path)
    else:
        width_raw, width_line = _require(entries, "sample", "width", path)
        height_raw, height_line = _require(entries, "sample", "height", path)
        width = _int_value(width_raw, "width", path, width_line, minimum=1)
        height = _int_value(height_raw, "height", path, height_line, minimum=1)
        if len(pixel_rows) != width * height:
            raise ConfigError(
                f"expected {width * height} pixel rows for {width}x{height}, got {len(pixel_rows)}",
                path=path,
            )
        pixels = tuple(
            _parse_pixel_fields(raw.split(), path, lineno) for lineno, raw in pixel_rows
        )
        sample = SampleModel(width, height, pixels)

    return ScenarioConfig(
        sample=sample,
        n=cycles,
        pairs_per_mode=pairs_per_mode,
        variant=variant,
        source=kind,
        seed=seed,
        bases=bases,
    )
