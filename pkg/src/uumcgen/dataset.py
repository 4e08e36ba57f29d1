"""Sample matrices produced by the simulators and sample-coupled generators."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError

STATIC = "static"
TIMESERIES = "timeseries"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Rows are samples (static) or time steps (time series); columns are variables."""

    data: np.ndarray
    kind: str = STATIC
    tau_max: int | None = None

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ParameterError(f"dataset must be a non-empty 2-D array, got shape {data.shape}")
        if not np.isfinite(data).all():
            raise ParameterError("dataset contains non-finite entries")
        if self.kind not in (STATIC, TIMESERIES):
            raise ParameterError(f"kind must be '{STATIC}' or '{TIMESERIES}', got {self.kind!r}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_vars(self) -> int:
        return self.data.shape[1]

    def __repr__(self):
        return f"Dataset(kind={self.kind!r}, shape={self.data.shape}, tau_max={self.tau_max})"


def write_csv(ds: Dataset, path) -> None:
    """Header ``X0,...,X{n-1}``; 17 significant digits round-trip every float64."""
    buf = io.StringIO()
    buf.write(",".join(f"X{i}" for i in range(ds.n_vars)) + "\n")
    np.savetxt(buf, ds.data, delimiter=",", fmt="%.17g")
    Path(path).write_text(buf.getvalue())


def read_csv(path, kind: str = STATIC, tau_max: int | None = None) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    expected = [f"X{i}" for i in range(len(header))]
    if header != expected:
        raise ParameterError(f"unexpected CSV header {header[:5]}...; expected X0,X1,...")
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return Dataset(data, kind=kind, tau_max=tau_max)
