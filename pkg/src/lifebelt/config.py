"""Flat key-value run configuration.

Config files are plain text, one ``section.key = value`` assignment per
line, with ``#`` comments and blank lines ignored.  Every command validates
against its own schema: unknown keys are errors (catching typos beats
silently ignoring them), missing required keys are errors, and every run
echoes its complete effective configuration so it can be re-run from the
echo alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

__all__ = [
    "ConfigError",
    "parse_config_text",
    "load_config",
    "render_config",
    "Field",
    "REQUIRED",
    "SCHEMAS",
    "resolve",
    "parse_grid_values",
]


class ConfigError(Exception):
    """A configuration problem the user must fix."""


REQUIRED = object()


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse ``section.key = value`` lines into a flat string map."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(
                f"{source}, line {lineno}: expected 'section.key = value', got {raw!r}"
            )
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or "." not in key:
            raise ConfigError(
                f"{source}, line {lineno}: keys must look like 'section.key', got {key!r}"
            )
        if key in out:
            raise ConfigError(f"{source}, line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def render_config(values: dict[str, Any]) -> str:
    """Canonical text form of an effective config, re-parseable as input."""
    lines = []
    for key in sorted(values):
        lines.append(f"{key} = {format_value(values[key])}")
    return "\n".join(lines) + "\n"


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    if value is None:
        return ""
    return str(value)


def _parse_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered == "true":
        return True
    if lowered == "false":
        return False
    raise ValueError("expected 'true' or 'false'")


def _parse_int_list(raw: str) -> list[int]:
    if raw == "":
        return []
    return [int(part.strip()) for part in raw.split(",")]


_PARSERS: dict[str, Callable[[str], Any]] = {
    "int": int,
    "float": float,
    "bool": _parse_bool,
    "str": str,
    "int_list": _parse_int_list,
}


@dataclass(frozen=True)
class Field:
    """One schema entry: how to parse a key and what to use if absent."""

    kind: str
    default: Any = REQUIRED

    def parse(self, key: str, raw: str) -> Any:
        try:
            return _PARSERS[self.kind](raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None


_COMMON = {
    "run.id": Field("str", default=None),
    "run.seed": Field("int", default=None),
    "run.out": Field("str", default="."),
    "run.threads": Field("int", default=1),
}

_MODEL_THETA = {
    "model.p_h": Field("float"),
    "model.p_d": Field("float"),
    "model.p_r": Field("float"),
}

_FILTER = {
    "filter.variant": Field("str", default="lbpf"),
    "filter.n_particles": Field("int", default=500),
    "filter.apf_cap": Field("int", default=1_000_000),
    "filter.exact_t0_weights": Field("bool", default=False),
}

SCHEMAS: dict[str, dict[str, Field]] = {
    "simulate": {
        **_COMMON,
        **_MODEL_THETA,
        "model.x0_rate": Field("float", default=1.5),
        "data.h": Field("int_list", default=None),
        "data.T": Field("int", default=None),
        "data.peak": Field("float", default=None),
        "data.center": Field("float", default=None),
        "data.width": Field("float", default=None),
    },
    "filter": {
        **_COMMON,
        **_MODEL_THETA,
        "model.x0_rate": Field("float", default=1.5),
        "data.path": Field("str"),
        **_FILTER,
        "filter.record_trajectories": Field("bool", default=False),
    },
    "grid": {
        **_COMMON,
        "model.p_r": Field("float", default=None),
        "model.x0_rate": Field("float", default=1.5),
        "data.path": Field("str"),
        **_FILTER,
        "grid.p_d": Field("str"),
        "grid.p_r": Field("str", default=None),
        "grid.replicates": Field("int", default=20),
    },
    "pmcmc": {
        **_COMMON,
        "model.x0_rate": Field("float", default=1.5),
        "data.path": Field("str"),
        **_FILTER,
        "pmcmc.iterations": Field("int", default=10_000),
        "pmcmc.scale": Field("float", default=0.3),
        "pmcmc.burn_in_fraction": Field("float", default=0.1),
        "pmcmc.thin": Field("int", default=1),
        "pmcmc.max_init_tries": Field("int", default=100),
        "pmcmc.init_p_h": Field("float", default=None),
        "pmcmc.init_p_d": Field("float", default=None),
        "pmcmc.init_p_r": Field("float", default=None),
    },
    "compare": {
        **_COMMON,
        "model.x0_rate": Field("float", default=1.5),
        "data.path": Field("str"),
        "compare.iterations": Field("int", default=10_000),
        "compare.scale": Field("float", default=0.3),
        "compare.n_particles": Field("int", default=500),
        "compare.apf_cap": Field("int", default=1_000_000),
        "compare.burn_in_fraction": Field("float", default=0.1),
        "compare.max_init_tries": Field("int", default=100),
        "compare.ess_threshold": Field("float", default=5.0),
        "compare.init_p_h": Field("float", default=None),
        "compare.init_p_d": Field("float", default=None),
        "compare.init_p_r": Field("float", default=None),
    },
}


def resolve(command: str, raw: dict[str, str]) -> dict[str, Any]:
    """Validate raw strings against the command schema and apply defaults.

    Empty string values mean "unset" and fall back to the default (this is
    what an echoed ``None`` round-trips to).
    """
    schema = SCHEMAS[command]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(
            f"unknown config keys for '{command}': {', '.join(unknown)}"
        )
    resolved: dict[str, Any] = {}
    missing = []
    for key, field in schema.items():
        if key in raw and raw[key] != "":
            resolved[key] = field.parse(key, raw[key])
        elif field.default is REQUIRED:
            missing.append(key)
        else:
            resolved[key] = field.default
    if missing:
        raise ConfigError(f"missing required config keys: {', '.join(missing)}")
    return resolved


def parse_grid_values(spec: str, key: str) -> list[float]:
    """Grid axis values: either ``lo:hi:count`` or a comma list."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: range form is 'lo:hi:count', got {spec!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"{key}: cannot parse range {spec!r}") from None
        if count < 1:
            raise ConfigError(f"{key}: count must be at least 1")
        if count == 1:
            return [lo]
        step = (hi - lo) / (count - 1)
        return [lo + i * step for i in range(count)]
    try:
        values = [float(part.strip()) for part in spec.split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigError(f"{key}: cannot parse value list {spec!r}") from None
    if not values:
        raise ConfigError(f"{key}: no values given")
    return values
