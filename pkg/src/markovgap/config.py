"""Config files: flat ``key = value`` text with typed keys, or a JSON object.

Text format::

    # comments start with '#'
    grid = 3,3,4; 2,2,12            # explicit list of N_A,N_B,N_C triples
    grid = n_ab=10 cross n_c=1..14  # or the phase-diagram product form
    samples_per_point = 200
    quantities = markov_gap, log_negativity
    master_seed = 42
    emit_svg = true

Every key has a fixed type (see ``SCHEMA``); unknown keys and malformed
values raise :class:`ConfigError`. A JSON file holds the same keys, with
``grid`` either a string in the syntax above or a list of triples.
"""

from __future__ import annotations

import json
import re
from typing import Any, Callable

from .errors import ConfigError


def parse_int(text: str) -> int:
    try:
        return int(str(text).strip(), 0)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def parse_float(text: str) -> float:
    try:
        return float(str(text).strip())
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}") from None


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def parse_range(text) -> list[int]:
    """``"5..11"`` (inclusive) or a comma list ``"5,7,9"``."""
    if isinstance(text, list):
        return [parse_int(x) for x in text]
    t = str(text).strip()
    m = re.fullmatch(r"(-?\d+)\s*\.\.\s*(-?\d+)", t)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ConfigError(f"empty range {t!r}")
        return list(range(lo, hi + 1))
    return [parse_int(x) for x in t.split(",") if x.strip()]


def parse_floats(text) -> list[float]:
    if isinstance(text, list):
        return [parse_float(x) for x in text]
    return [parse_float(x) for x in str(text).split(",") if x.strip()]


def parse_names(text) -> list[str]:
    if isinstance(text, list):
        return [str(x).strip() for x in text]
    return [x.strip() for x in str(text).split(",") if x.strip()]


def parse_triple(text) -> tuple[int, int, int]:
    vals = parse_range(text) if not isinstance(text, (list, tuple)) else [parse_int(x) for x in text]
    if len(vals) != 3:
        raise ConfigError(f"expected N_A,N_B,N_C, got {text!r}")
    return tuple(vals)


def parse_grid(text) -> list[tuple[int, int, int]]:
    """Explicit ``"a,b,c; a,b,c"`` list or ``"n_ab=K cross n_c=LO..HI"``."""
    if isinstance(text, list):
        return [parse_triple(p) for p in text]
    t = str(text).strip()
    m = re.fullmatch(r"n_ab\s*=\s*(\d+)\s+cross\s+n_c\s*=\s*(.+)", t)
    if m:
        n_ab = int(m.group(1))
        if n_ab < 2:
            raise ConfigError("n_ab must be at least 2 in the cross form")
        return [(n_a, n_ab - n_a, n_c) for n_c in parse_range(m.group(2)) for n_a in range(1, n_ab)]
    points = [parse_triple(p) for p in t.split(";") if p.strip()]
    if not points:
        raise ConfigError("grid is empty")
    return points


SCHEMA: dict[str, Callable[[Any], Any]] = {
    "grid": parse_grid,
    "samples_per_point": parse_int,
    "samples": parse_int,
    "quantities": parse_names,
    "master_seed": parse_int,
    "seed": parse_int,
    "output_path": str,
    "out": str,
    "emit_svg": parse_bool,
    "threads": parse_int,
    # experiment-specific
    "n_ab": parse_int,
    "n_c_max": parse_int,
    "n_a": parse_int,
    "n_b": parse_int,
    "n_c": parse_int,
    "n_c_range": parse_range,
    "point": parse_triple,
    "epsilons": parse_floats,
    "d_sys": parse_int,
    "d_env": parse_int,
    "qubits": parse_int,
    "count": parse_int,
    "restarts": parse_int,
    "max_iterations": parse_int,
    "state": str,
    "weights": parse_floats,
    "specs": parse_int,
}

ALIASES = {"samples": "samples_per_point", "seed": "master_seed", "out": "output_path"}


def _typed(raw: dict[str, Any]) -> dict[str, Any]:
    out = {}
    for key, value in raw.items():
        key = key.strip()
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            parsed = SCHEMA[key](value)
        except ConfigError as exc:
            raise ConfigError(f"{key}: {exc}") from None
        out[ALIASES.get(key, key)] = parsed
    return out


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse either format; JSON is detected by a leading ``{``."""
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("JSON config must be an object")
        return _typed(raw)
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value.strip()
    return _typed(raw)


def load_config(path: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text)


def dump_config(values: dict[str, Any]) -> str:
    """Inverse of :func:`parse_config_text` for the text format."""
    lines = []
    for key in sorted(values):
        v = values[key]
        if key == "grid":
            v = "; ".join(",".join(str(x) for x in p) for p in v)
        elif isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, (list, tuple)):
            v = ",".join(str(x) for x in v)
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"
