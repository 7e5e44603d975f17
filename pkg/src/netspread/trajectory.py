"""Shared trajectory container with deterministic CSV serialisation."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

__all__ = ["Trajectory"]


def _format_value(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12e}"


@dataclass
class Trajectory:
    """Time-stamped rows of named columns.

    ``times`` must be strictly increasing; every column must have the same
    length as ``times``.  Column order is preserved for CSV output.
    """

    times: np.ndarray
    columns: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times)
        if self.times.ndim != 1:
            raise ValueError("times must be one-dimensional")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        for name, col in self.columns.items():
            arr = np.asarray(col)
            if arr.shape != self.times.shape:
                raise ValueError(
                    f"column {name!r} has shape {arr.shape}, expected {self.times.shape}"
                )
            self.columns[name] = arr

    def __len__(self) -> int:
        return len(self.times)

    def write_csv(self, destination: str | Path | IO[str]) -> None:
        """Write ``t,<columns...>`` rows; floats carry 13 significant digits."""
        header = "t," + ",".join(self.columns)
        lines = [header]
        cols = list(self.columns.values())
        time_is_int = np.issubdtype(self.times.dtype, np.integer)
        for k in range(len(self.times)):
            t = int(self.times[k]) if time_is_int else self.times[k]
            cells = [_format_value(t)]
            cells.extend(_format_value(c[k]) for c in cols)
            lines.append(",".join(cells))
        text = "\n".join(lines) + "\n"
        if hasattr(destination, "write"):
            destination.write(text)  # type: ignore[union-attr]
        else:
            Path(destination).write_text(text, encoding="utf-8")
