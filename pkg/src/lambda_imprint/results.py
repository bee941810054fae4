"""Result files: CSV observable tables, a JSON manifest and binary field records.

Binary records start with a 128-byte little-endian header::

    magic      8s   b"LIMPREC1"
    n_z        u4
    n_t        u4
    n_channels u4
    (pad)      4x
    t_min      f8   tau_a
    dt         f8   tau_a
    dz         f8   1/kappa_a
    kind       16s  "fields" (omega13, omega23) or "rho" (rho11 rho22 rho33 rho12 rho13 rho23)
    units      64s

followed by complex128 samples in (z, t, channel) order, real and
imaginary parts interleaved.
"""
from __future__ import annotations

import csv
import json
import os
import struct
from dataclasses import dataclass
from importlib import metadata

import numpy as np

from .config import config_hash, serialize_config
from .dynamics import FieldRecord
from .errors import OutputError
from .scenarios import ScenarioConfig, Table

MAGIC = b"LIMPREC1"
HEADER = struct.Struct("<8sIII4xddd16s64s")
UNITS = "t:tau_a z:1/kappa_a omega:1/tau_a rho:dimensionless"


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return str(v)


def write_table(table: Table, out_dir) -> str:
    path = os.path.join(out_dir, f"{table.name}.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])
    return path


def read_table(path) -> Table:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    name = os.path.splitext(os.path.basename(path))[0]

    def conv(s):
        try:
            return float(s)
        except ValueError:
            return s

    return Table(name, tuple(rows[0]), [tuple(conv(c) for c in r) for r in rows[1:]])


def write_record(path, record: FieldRecord, kind: str = "fields") -> None:
    g = record.grid
    if kind == "fields":
        if record.omega13 is None:
            raise ValueError("record has no retained fields")
        data = np.stack([record.omega13, record.omega23], axis=-1)
    elif kind == "rho":
        if record.rho is None:
            raise ValueError("record has no retained density matrices")
        data = record.rho
    else:
        raise ValueError(f"unknown record kind {kind!r}")
    n_z, n_t, n_ch = data.shape
    head = HEADER.pack(MAGIC, n_z, n_t, n_ch, g.t_min, g.dt, g.dz,
                       kind.encode(), UNITS.encode())
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(np.ascontiguousarray(data, dtype="<c16").tobytes())


@dataclass(frozen=True)
class RecordHeader:
    n_z: int
    n_t: int
    n_channels: int
    t_min: float
    dt: float
    dz: float
    kind: str
    units: str


def read_record(path) -> tuple[RecordHeader, np.ndarray]:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, n_z, n_t, n_ch, t_min, dt, dz, kind, units = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path} is not a record file")
    head = RecordHeader(n_z, n_t, n_ch, t_min, dt, dz,
                        kind.rstrip(b"\0").decode(), units.rstrip(b"\0").decode())
    data = np.frombuffer(raw, dtype="<c16", offset=HEADER.size).reshape(n_z, n_t, n_ch)
    return head, data


def write_results(out_dir, tables: list[Table], *, config: ScenarioConfig | None = None,
                  runtime_s: float | None = None, record: FieldRecord | None = None,
                  extra: dict | None = None) -> dict:
    """Write every table as CSV plus ``manifest.json``; returns the manifest."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        files = [os.path.basename(write_table(t, out_dir)) for t in tables]
        manifest = {"tool_version": tool_version(), "tables": files,
                    "runtime_s": runtime_s}
        if config is not None:
            g = config.grid()
            manifest["config_hash"] = config_hash(config)
            manifest["grid"] = {"t_min": g.t_min, "t_max": g.t_max, "dt": g.dt,
                                "dz": g.dz, "z_max": g.z_max, "n_t": g.n_t, "n_z": g.n_z}
            with open(os.path.join(out_dir, "config.toml"), "w", encoding="utf-8") as fh:
                fh.write(serialize_config(config))
        errors = {t.name: {str(k): v for k, v in t.errors.items()} for t in tables if t.errors}
        if errors:
            manifest["row_errors"] = errors
        if record is not None and record.omega13 is not None:
            write_record(os.path.join(out_dir, "fields.bin"), record, "fields")
            manifest["records"] = ["fields.bin"]
            if record.rho is not None:
                write_record(os.path.join(out_dir, "rho.bin"), record, "rho")
                manifest["records"].append("rho.bin")
        if extra:
            manifest.update(extra)
        with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write results to {out_dir}: {exc}") from exc
    return manifest
