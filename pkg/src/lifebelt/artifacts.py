"""Reading and writing run artifacts.

Every artifact this package writes embeds the seed and the complete
effective configuration of the run that produced it: CSV files start with a
``# section.key = value`` comment block, JSON files carry a ``"config"``
object.  Re-running a command from an echoed config therefore reproduces the
numeric columns byte for byte.

CSV numeric cells use ``repr`` of the Python float (shortest round-trip
form), so equality of files means equality of values.  Non-finite floats in
JSON are stored as the strings ``"-inf"``, ``"inf"`` and ``"nan"`` because
strict JSON has no encoding for them; :func:`as_float` undoes this.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .config import format_value, parse_config_text
from .model import Dataset, LatentPath

__all__ = [
    "DataFormatError",
    "DATASET_COLUMNS",
    "LATENT_COLUMNS",
    "TRAJECTORY_COLUMNS",
    "GRID_COLUMNS",
    "TRACE_COLUMNS",
    "ITERATION_COLUMNS",
    "format_cell",
    "write_csv",
    "read_csv",
    "CsvTable",
    "write_dataset_csv",
    "read_dataset_csv",
    "write_latent_csv",
    "sanitize_for_json",
    "write_json",
    "read_json",
    "as_float",
]


class DataFormatError(Exception):
    """An input file does not match the expected format."""


DATASET_COLUMNS = ("t", "h_in", "y_deaths")
LATENT_COLUMNS = ("t", "x", "z")
TRAJECTORY_COLUMNS = ("t", "particle", "x", "norm_w", "group", "resampled_from")
GRID_COLUMNS = (
    "point",
    "replicate",
    "p_h",
    "p_d",
    "p_r",
    "seed",
    "loglik",
    "collapsed_at",
    "final_ess",
    "total_attempts",
)
TRACE_COLUMNS = (
    "iter",
    "gamma1",
    "gamma2",
    "p_h",
    "p_d",
    "p_r",
    "loglik",
    "accepted",
)
ITERATION_COLUMNS = (
    "iter",
    "variant",
    "accepted",
    "evaluated",
    "loglik",
    "prop_loglik",
    "prop_mean_ess",
    "prop_final_ess",
    "prop_attempts",
    "prop_collapsed",
    "prop_saturated",
)


def format_cell(value: Any) -> str:
    """Canonical text form of a CSV cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(
    path,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    echo: dict[str, Any],
) -> None:
    """Write a CSV with a leading ``# key = value`` provenance block."""
    lines = [f"# {key} = {format_value(echo[key])}" for key in sorted(echo)]
    lines.append(",".join(columns))
    n_cols = len(columns)
    for row in rows:
        cells = [format_cell(v) for v in row]
        if len(cells) != n_cols:
            raise ValueError(
                f"row has {len(cells)} cells, expected {n_cols}: {cells!r}"
            )
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class CsvTable:
    """A parsed CSV artifact: provenance echo, header, and raw string rows."""

    echo: dict[str, str]
    columns: tuple[str, ...]
    rows: list[list[str]]

    def column(self, name: str) -> list[str]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def float_column(self, name: str) -> np.ndarray:
        return np.array([float(v) for v in self.column(name)])


def read_csv(path) -> CsvTable:
    """Read any artifact CSV written by :func:`write_csv`."""
    echo_lines: list[str] = []
    columns: tuple[str, ...] | None = None
    rows: list[list[str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line.startswith("#"):
                echo_lines.append(line[1:].strip())
                continue
            if line.strip() == "":
                continue
            if columns is None:
                columns = tuple(part.strip() for part in line.split(","))
                continue
            cells = line.split(",")
            if len(cells) != len(columns):
                raise DataFormatError(
                    f"{path}, line {lineno}: expected {len(columns)} fields, "
                    f"got {len(cells)}"
                )
            rows.append(cells)
    if columns is None:
        raise DataFormatError(f"{path}: no header line found")
    echo = parse_config_text("\n".join(echo_lines), source=str(path))
    return CsvTable(echo=echo, columns=columns, rows=rows)


def write_dataset_csv(path, dataset: Dataset, echo: dict[str, Any]) -> None:
    rows = [
        (t, int(dataset.h[t - 1]), int(dataset.y[t - 1]))
        for t in range(1, dataset.T + 1)
    ]
    write_csv(path, DATASET_COLUMNS, rows, echo)


def read_dataset_csv(path, x0_rate: float) -> tuple[Dataset, dict[str, str]]:
    """Strictly parse a dataset CSV.

    The CSV holds the observation record only; ``x0_rate`` travels in the
    run config, not the file.  Any malformed content is reported with the
    exact line it occurred on.
    """
    echo_lines: list[str] = []
    header_seen = False
    expected_t = 1
    h_vals: list[int] = []
    y_vals: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line.startswith("#"):
                echo_lines.append(line[1:].strip())
                continue
            if line.strip() == "":
                continue
            if not header_seen:
                header = tuple(part.strip() for part in line.split(","))
                if header != DATASET_COLUMNS:
                    raise DataFormatError(
                        f"{path}, line {lineno}: header must be "
                        f"'{','.join(DATASET_COLUMNS)}', got {line!r}"
                    )
                header_seen = True
                continue
            cells = line.split(",")
            if len(cells) != 3:
                raise DataFormatError(
                    f"{path}, line {lineno}: expected 3 fields, got {len(cells)}"
                )
            try:
                t, h_in, y_deaths = (int(c.strip()) for c in cells)
            except ValueError:
                raise DataFormatError(
                    f"{path}, line {lineno}: non-integer field in {line!r}"
                ) from None
            if t != expected_t:
                raise DataFormatError(
                    f"{path}, line {lineno}: expected t={expected_t}, got t={t}"
                )
            if h_in < 0 or y_deaths < 0:
                raise DataFormatError(
                    f"{path}, line {lineno}: negative count in {line!r}"
                )
            h_vals.append(h_in)
            y_vals.append(y_deaths)
            expected_t += 1
    if not header_seen:
        raise DataFormatError(f"{path}: no header line found")
    if not h_vals:
        raise DataFormatError(f"{path}: no observation rows")
    echo = parse_config_text("\n".join(echo_lines), source=str(path))
    dataset = Dataset(
        h=np.array(h_vals, dtype=np.int64),
        y=np.array(y_vals, dtype=np.int64),
        x0_rate=float(x0_rate),
    )
    return dataset, echo


def write_latent_csv(path, latent: LatentPath, echo: dict[str, Any]) -> None:
    """Latent path rows; z is undefined at t=0 and left empty there."""
    rows: list[tuple[Any, ...]] = [(0, int(latent.x[0]), None)]
    for t in range(1, len(latent.x)):
        rows.append((t, int(latent.x[t]), int(latent.z[t - 1])))
    write_csv(path, LATENT_COLUMNS, rows, echo)


def sanitize_for_json(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats to strict JSON."""
    if isinstance(value, dict):
        return {str(k): sanitize_for_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize_for_json(v) for v in value]
    if isinstance(value, np.ndarray):
        return [sanitize_for_json(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isnan(value):
            return "nan"
        if np.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def write_json(path, payload: dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(sanitize_for_json(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def as_float(value: Any) -> float:
    """Undo the JSON encoding of non-finite floats."""
    if isinstance(value, str):
        return float(value)
    return float(value)
