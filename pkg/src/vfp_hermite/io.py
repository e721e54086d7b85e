"""Diagnostics CSV sink and run manifest.

The CSV column order is fixed; floats are written with Python's shortest
round-trip repr so identical runs produce byte-identical files and
downstream plotting sees the exact computed values.  Diagnostics that
were not computed are written as empty fields, never as zeros.
"""

from __future__ import annotations

import json
from pathlib import Path

from .diagnostics import DiagnosticsRecord

CSV_COLUMNS = (
    "step",
    "t",
    "l2_dist",
    "rho_dist",
    "dperp",
    "d1_norm",
    "b_norm",
    "hminus1_macro",
    "mass",
    "H0",
    "H1",
    "Efun",
)


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


class CsvSink:
    """Streams DiagnosticsRecord rows to a CSV file, header written once."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = open(self.path, "w", encoding="ascii", newline="\n")
        self._handle.write(",".join(CSV_COLUMNS) + "\n")
        self.rows = 0

    def emit(self, record: DiagnosticsRecord) -> None:
        values = (
            record.step,
            record.t,
            record.l2_dist,
            record.rho_dist,
            record.dperp,
            record.d1_norm,
            record.b_norm,
            record.hminus1_macro,
            record.mass,
            record.H0,
            record.H1,
            record.Efun,
        )
        self._handle.write(",".join(format_value(v) for v in values) + "\n")
        self.rows += 1

    def close(self) -> None:
        self._handle.flush()
        self._handle.close()

    def __enter__(self) -> "CsvSink":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class ListSink:
    """In-memory sink for tests and rate fitting."""

    def __init__(self):
        self.records: list[DiagnosticsRecord] = []

    def emit(self, record: DiagnosticsRecord) -> None:
        self.records.append(record)

    def column(self, name: str) -> list:
        return [getattr(record, name) for record in self.records]


def read_csv(path: str | Path) -> dict[str, list[float | None]]:
    """Read a diagnostics CSV back into columns (None for empty fields)."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    columns: dict[str, list[float | None]] = {name: [] for name in header}
    for line in lines[1:]:
        for name, cell in zip(header, line.split(",")):
            columns[name].append(float(cell) if cell else None)
    return columns


def write_manifest(path: str | Path, manifest: dict) -> None:
    """Deterministic JSON dump (sorted keys, round-trip floats)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="ascii")


def read_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="ascii"))
