"""Causality maps between one index series and every gridpoint of a 2-D field.

Each unmasked cell is paired with the index series and run through the full
two-series pipeline (align, covariances, MLE, Fisher intervals); cells are
fully independent, so a single-cell grid reproduces the pair pipeline
bitwise. Cells whose series are degenerate are reported as missing (NaN flow,
significance False) without aborting the map.

Grid storage is a plain-text trio:

  manifest CSV    key,value rows: n_lat, n_lon, n_time, dt, values_file,
                  mask_file (optional), t0 (optional); paths are relative
                  to the manifest.
  values CSV      n_time rows, each with n_lat * n_lon cells in row-major
                  (lat, lon) order.
  mask CSV        n_lat rows of n_lon flags, 1 = valid cell, 0 = masked.

'#' comment lines are allowed everywhere.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DtMismatch, GridFormatError, LengthMismatch, NumericalError
from .estimator import covariances, fisher_ci, fit_mle
from .series import TimeSeries, align

MISSING = float("nan")


@dataclass(frozen=True)
class GridField:
    """A dense [time][lat][lon] field with a validity mask."""

    values: np.ndarray
    dt: float
    mask: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 3:
            raise ValueError(f"field values must be [time][lat][lon], got shape {values.shape}")
        if values.shape[0] < 3:
            raise ValueError(f"field needs at least 3 time steps, got {values.shape[0]}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be a positive finite real, got {self.dt}")
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != values.shape[1:]:
            raise ValueError(f"mask shape {mask.shape} does not match grid {values.shape[1:]}")
        if not np.isfinite(values[:, mask]).all():
            raise ValueError("unmasked cells contain non-finite values")
        values.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @property
    def n_time(self) -> int:
        return self.values.shape[0]

    @property
    def n_lat(self) -> int:
        return self.values.shape[1]

    @property
    def n_lon(self) -> int:
        return self.values.shape[2]

    def cell_series(self, lat: int, lon: int) -> TimeSeries:
        return TimeSeries(self.values[:, lat, lon], self.dt, self.t0, f"cell[{lat},{lon}]")


@dataclass(frozen=True)
class FlowMap:
    """Per-cell flow rates and significance flags in both directions.

    Masked or degenerate cells carry NaN flow and significance False.
    """

    t_index_to_field: np.ndarray
    t_field_to_index: np.ndarray
    significant_index_to_field: np.ndarray
    significant_field_to_index: np.ndarray
    alpha: float


def map_flows(index: TimeSeries, field: GridField, alpha: float = 0.05) -> FlowMap:
    """Run the two-series pipeline between the index and every unmasked cell."""
    if len(index) != field.n_time:
        raise LengthMismatch(
            f"index length {len(index)} does not match field n_time {field.n_time}"
        )
    if not math.isclose(index.dt, field.dt, rel_tol=1e-12, abs_tol=0.0):
        raise DtMismatch(f"index dt {index.dt} does not match field dt {field.dt}")
    shape = (field.n_lat, field.n_lon)
    t_i2f = np.full(shape, MISSING)
    t_f2i = np.full(shape, MISSING)
    sig_i2f = np.zeros(shape, dtype=bool)
    sig_f2i = np.zeros(shape, dtype=bool)
    for lat in range(field.n_lat):
        for lon in range(field.n_lon):
            if not field.mask[lat, lon]:
                continue
            try:
                pair = align(index, field.cell_series(lat, lon))
                cov = covariances(pair)
                est = fisher_ci(pair, fit_mle(pair, cov), cov, alpha)
            except NumericalError:
                continue  # cell stays missing
            # pair is (x1=index, x2=cell): t12 flows index -> cell
            t_i2f[lat, lon] = est.t12
            t_f2i[lat, lon] = est.t21
            sig_i2f[lat, lon] = est.significant12()
            sig_f2i[lat, lon] = est.significant21()
    return FlowMap(
        t_index_to_field=t_i2f,
        t_field_to_index=t_f2i,
        significant_index_to_field=sig_i2f,
        significant_field_to_index=sig_f2i,
        alpha=alpha,
    )


# --- grid I/O ----------------------------------------------------------------


def _read_rows(path) -> list[list[str]]:
    try:
        with open(path, newline="") as fh:
            lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError as exc:
        raise GridFormatError(f"cannot read {path}: {exc}")
    return list(csv.reader(lines))


def load_grid(manifest_path) -> GridField:
    """Load a GridField from its manifest CSV."""
    entries: dict[str, str] = {}
    for row in _read_rows(manifest_path):
        if len(row) < 2:
            raise GridFormatError(f"{manifest_path}: malformed manifest row {row!r}")
        entries[row[0].strip()] = row[1].strip()
    for key in ("n_lat", "n_lon", "n_time", "dt", "values_file"):
        if key not in entries:
            raise GridFormatError(f"{manifest_path}: manifest is missing key {key!r}")
    try:
        n_lat = int(entries["n_lat"])
        n_lon = int(entries["n_lon"])
        n_time = int(entries["n_time"])
        dt = float(entries["dt"])
        t0 = float(entries.get("t0", "0"))
    except ValueError as exc:
        raise GridFormatError(f"{manifest_path}: bad manifest value: {exc}")

    base = os.path.dirname(os.path.abspath(manifest_path))
    values_path = os.path.join(base, entries["values_file"])
    rows = _read_rows(values_path)
    if len(rows) != n_time:
        raise GridFormatError(f"{values_path}: expected {n_time} rows, found {len(rows)}")
    try:
        flat = np.array([[float(cell) for cell in row] for row in rows])
    except ValueError as exc:
        raise GridFormatError(f"{values_path}: non-numeric cell: {exc}")
    if flat.shape[1] != n_lat * n_lon:
        raise GridFormatError(
            f"{values_path}: expected {n_lat * n_lon} columns, found {flat.shape[1]}"
        )
    values = flat.reshape(n_time, n_lat, n_lon)

    if "mask_file" in entries:
        mask_rows = _read_rows(os.path.join(base, entries["mask_file"]))
        if len(mask_rows) != n_lat or any(len(r) != n_lon for r in mask_rows):
            raise GridFormatError(f"mask file must be {n_lat} rows of {n_lon} flags")
        mask = np.array([[cell.strip() == "1" for cell in row] for row in mask_rows])
    else:
        mask = np.ones((n_lat, n_lon), dtype=bool)
    return GridField(values=values, dt=dt, mask=mask, t0=t0)


def write_grid(field: GridField, out_dir, basename: str = "grid") -> str:
    """Write a GridField as manifest + values + mask CSVs; returns manifest path."""
    os.makedirs(out_dir, exist_ok=True)
    values_name = f"{basename}_values.csv"
    mask_name = f"{basename}_mask.csv"
    with open(os.path.join(out_dir, values_name), "w", newline="") as fh:
        for t in range(field.n_time):
            fh.write(",".join(f"{v:.17g}" for v in field.values[t].ravel()) + "\n")
    with open(os.path.join(out_dir, mask_name), "w", newline="") as fh:
        for lat in range(field.n_lat):
            fh.write(",".join("1" if v else "0" for v in field.mask[lat]) + "\n")
    manifest_path = os.path.join(out_dir, f"{basename}_manifest.csv")
    with open(manifest_path, "w", newline="") as fh:
        fh.write(f"n_lat,{field.n_lat}\n")
        fh.write(f"n_lon,{field.n_lon}\n")
        fh.write(f"n_time,{field.n_time}\n")
        fh.write(f"dt,{field.dt:.17g}\n")
        fh.write(f"t0,{field.t0:.17g}\n")
        fh.write(f"values_file,{values_name}\n")
        fh.write(f"mask_file,{mask_name}\n")
    return manifest_path


def write_flow_maps(fm: FlowMap, out_dir, header_comment: str = "") -> dict[str, str]:
    """Write the four per-direction matrices as CSVs; returns name -> path."""
    os.makedirs(out_dir, exist_ok=True)
    outputs = {
        "flow_index_to_field": fm.t_index_to_field,
        "flow_field_to_index": fm.t_field_to_index,
        "significant_index_to_field": fm.significant_index_to_field,
        "significant_field_to_index": fm.significant_field_to_index,
    }
    paths = {}
    for name, grid in outputs.items():
        path = os.path.join(out_dir, f"{name}.csv")
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            for row in grid:
                if grid.dtype == bool:
                    fh.write(",".join("1" if v else "0" for v in row) + "\n")
                else:
                    fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        paths[name] = path
    return paths
