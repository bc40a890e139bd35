"""Persistent formats: profile, trace and sweep CSVs, plot data and metadata JSON.

All files are UTF-8 with LF line endings; floats are written with 17
significant digits so that a write/read round trip is exact.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, fields
from pathlib import Path
from typing import Iterable

import numpy as np

from . import __version__
from .dkg_iter import TraceRow
from .grid import RadialGrid
from .profiles import PhysParams, ScalarProfile, SolitaryWave, SpinorProfile
from .sweep import SweepRow, SweepTable

PROFILE_HEADER = ("r", "v", "u", "h")
TRACE_HEADER = ("iter", "g", "v0", "h0", "Q", "E", "Qt", "Et", "eps")


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _write_rows(path, header: Iterable[str], rows: Iterable[Iterable]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])
    return path


def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader if row]


def write_profile(path, wave: SolitaryWave) -> Path:
    r = wave.grid.nodes
    data = zip(r, wave.spinor.v, wave.spinor.u, wave.scalar.values)
    return _write_rows(path, PROFILE_HEADER, data)


def read_profile(path) -> dict[str, np.ndarray]:
    header, rows = _read_rows(path)
    if tuple(header) != PROFILE_HEADER:
        raise ValueError(f"{path}: expected header {','.join(PROFILE_HEADER)}")
    data = np.array(rows, dtype=float)
    return {name: data[:, k] for k, name in enumerate(header)}


def write_trace(path, trace: Iterable[TraceRow]) -> Path:
    return _write_rows(path, TRACE_HEADER, ([getattr(row, k) for k in TRACE_HEADER] for row in trace))


def read_trace(path) -> list[dict]:
    header, rows = _read_rows(path)
    if tuple(header) != TRACE_HEADER:
        raise ValueError(f"{path}: expected header {','.join(TRACE_HEADER)}")
    return [{k: (int(x) if k == "iter" else float(x)) for k, x in zip(header, row)} for row in rows]


def _parse(field_type, text: str):
    if field_type in (bool, "bool"):
        return text == "true"
    if field_type in (int, "int"):
        return int(text)
    if field_type in (float, "float"):
        return float(text)
    return text


def write_sweep(path, table: SweepTable) -> Path:
    names = [f.name for f in fields(SweepRow)]
    return _write_rows(path, names, ([getattr(row, k) for k in names] for row in table.rows))


def read_sweep(path, kind: str, n: int) -> SweepTable:
    types = {f.name: f.type for f in fields(SweepRow)}
    header, rows = _read_rows(path)
    parsed = [SweepRow(**{k: _parse(types[k], x) for k, x in zip(header, row)}) for row in rows]
    return SweepTable(kind, n, parsed)


def write_curve(path, x, y, names: tuple[str, str]) -> Path:
    return _write_rows(path, names, zip(x, y))


def write_plot_data(directory, table: SweepTable, label: str) -> list[Path]:
    """Two-column ``omega,E`` and ``omega,Q`` files for one curve."""
    directory = Path(directory)
    w = table.column("omega")
    return [write_curve(directory / f"E_{label}.csv", w, table.column("Et"), ("omega", "E")),
            write_curve(directory / f"Q_{label}.csv", w, table.column("Qt"), ("omega", "Q"))]


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Path):
        return str(value)
    return value


def write_metadata(path, record: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"version": __version__, **_jsonable(record)}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def save_wave(directory, stem: str, wave: SolitaryWave, extra: dict | None = None) -> Path:
    """Write ``<stem>_profile.csv`` and the ``<stem>.json`` record that points to it."""
    directory = Path(directory)
    profile = write_profile(directory / f"{stem}_profile.csv", wave)
    record = {
        "kind": "solitary_wave",
        "profile": profile.name,
        "params": asdict(wave.params),
        "gauge": wave.gauge,
        "method": wave.method,
        "converged": wave.converged,
        "step": wave.grid.step,
        "wave_meta": wave.meta,
        **(extra or {}),
    }
    return write_metadata(directory / f"{stem}.json", record)


def load_wave(path) -> SolitaryWave:
    """Rebuild a wave from a record written by :func:`save_wave`."""
    path = Path(path)
    record = json.loads(path.read_text(encoding="utf-8"))
    if record.get("kind") != "solitary_wave":
        raise ValueError(f"{path} is not a solitary-wave record")
    data = read_profile(path.parent / record["profile"])
    grid = RadialGrid.from_count(data["r"].size, float(record["step"]))
    params = PhysParams(**record["params"])
    meta = {k: v for k, v in record.get("wave_meta", {}).items() if isinstance(v, (int, float))}
    return SolitaryWave(params, SpinorProfile(grid, data["v"], data["u"]),
                        ScalarProfile(grid, data["h"], mass=params.M), gauge=record["gauge"],
                        method=record["method"], converged=record["converged"], meta=meta)
