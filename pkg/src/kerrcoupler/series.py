"""Time series container and its CSV form.

CSV layout::

    #@ key = value          (one line per config entry, reloadable)
    # free-form metadata
    t,col1,col2,...
    0,0.12345678901234567,null

Numbers are written with 17 significant digits; missing values (NaN) are
written as ``null``. Line endings are always ``\\n``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

NULL = "null"
CONFIG_PREFIX = "#@ "


def fmt(x: float) -> str:
    x = float(x)
    if np.isnan(x):
        return NULL
    if x == 0:
        return "0"  # collapses -0.0 as well
    return format(x, ".17g")


@dataclass(frozen=True)
class TimeSeries:
    columns: tuple[str, ...]
    times: np.ndarray
    values: np.ndarray
    metadata: Mapping[str, str] = field(default_factory=dict)
    config_lines: tuple[str, ...] = ()

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape != (t.size, len(self.columns)):
            raise ValueError(f"values shape {v.shape} != ({t.size}, {len(self.columns)})")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "columns", tuple(self.columns))

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]

    def __len__(self):
        return self.times.size

    def to_csv_text(self) -> str:
        buf = io.StringIO(newline="")
        for line in self.config_lines:
            buf.write(f"{CONFIG_PREFIX}{line}\n")
        for key, value in self.metadata.items():
            buf.write(f"# {key}: {value}\n")
        buf.write(",".join(("t",) + self.columns) + "\n")
        for t, row in zip(self.times, self.values):
            buf.write(",".join([fmt(t)] + [fmt(x) for x in row]) + "\n")
        return buf.getvalue()

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())
        return path


def read_csv(path) -> TimeSeries:
    """Inverse of :meth:`TimeSeries.write_csv` (metadata comments are kept)."""
    config, meta, header, rows = [], {}, None, []
    with open(path, newline="") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if line.startswith(CONFIG_PREFIX):
                config.append(line[len(CONFIG_PREFIX):])
            elif line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                meta[key] = value
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append([np.nan if x == NULL else float(x) for x in line.split(",")])
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return TimeSeries(tuple(header[1:]), data[:, 0], data[:, 1:], meta, tuple(config))


def stack_columns(columns: Sequence[str], times, series: Sequence[Sequence[float]], **kw) -> TimeSeries:
    return TimeSeries(tuple(columns), np.asarray(times), np.column_stack(series), **kw)
