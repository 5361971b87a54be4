from __future__ import annotations

import csv
import logging
import math
import threading
from pathlib import Path
from typing import Any, Iterable, Sequence

import yaml

from . import __version__
from .errors import PotentialFormatError
from .utils import format_float

LOG = logging.getLogger("singrobin.store")


def _cell(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return format_float(value)
    return str(value)


class RunStore:
    """Owns one output directory: CSV tables, a YAML manifest and text reports."""

    def __init__(self, path: str | Path) -> None:
        self._path = Path(path)
        self._path.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    @property
    def path(self) -> Path:
        return self._path

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        target = self._path / name
        with self._lock, target.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        LOG.info("Wrote %s", target)
        return target

    def write_manifest(self, command: str, config: dict[str, Any], extra: dict[str, Any] | None = None) -> Path:
        payload = {
            "command": command,
            "version": __version__,
            "config": config,
            "results": extra or {},
        }
        target = self._path / "manifest.yaml"
        with self._lock:
            target.write_text(yaml.safe_dump(payload, sort_keys=True), encoding="utf-8")
        return target

    def write_text(self, name: str, text: str) -> Path:
        target = self._path / name
        with self._lock:
            target.write_text(text, encoding="utf-8")
        return target


def _is_header(row: list[str]) -> bool:
    try:
        float(row[0])
    except ValueError:
        return True
    return False


def read_potential_table(path: str | Path) -> tuple[list[float], list[float]]:
    source = Path(path)
    if not source.exists():
        raise PotentialFormatError(f"potential file not found: {source}")
    r_values: list[float] = []
    q_values: list[float] = []
    with source.open(encoding="utf-8", newline="") as handle:
        for row_number, row in enumerate(csv.reader(handle), start=1):
            row = [cell.strip() for cell in row if cell.strip()]
            if not row:
                continue
            if row_number == 1 and _is_header(row):
                continue
            if len(row) < 2:
                raise PotentialFormatError("expected two columns (r, q)", row_number)
            try:
                r, q = float(row[0]), float(row[1])
            except ValueError as exc:
                raise PotentialFormatError(f"non-numeric entry {row!r}", row_number) from exc
            if not (math.isfinite(r) and math.isfinite(q)):
                raise PotentialFormatError("non-finite entry", row_number)
            if not 0.0 < r <= 1.0:
                raise PotentialFormatError(f"r={r} outside (0, 1]", row_number)
            if r_values and r <= r_values[-1]:
                raise PotentialFormatError("r values must be strictly increasing", row_number)
            r_values.append(r)
            q_values.append(q)
    if not r_values:
        raise PotentialFormatError(f"no samples in {source}")
    return r_values, q_values


def read_tail(path: str | Path) -> list[tuple[int | None, float]]:
    """Read an eigenvalue tail: columns (index, lambda) or (lambda) alone.

    A spectrum file (with a mode_n column) contributes its negative mode-0 rows only.
    """
    source = Path(path)
    if not source.exists():
        raise PotentialFormatError(f"tail file not found: {source}")
    rows: list[tuple[int | None, float]] = []
    with source.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header: list[str] | None = None
        for row_number, row in enumerate(reader, start=1):
            row = [cell.strip() for cell in row]
            if not any(row):
                continue
            if header is None and _is_header(row):
                header = [cell.lower() for cell in row]
                continue
            try:
                if header is not None and "lambda" in header:
                    lam = float(row[header.index("lambda")])
                    index = None
                    if "index" in header and row[header.index("index")]:
                        index = int(row[header.index("index")])
                    if "mode_n" in header and (int(row[header.index("mode_n")]) != 0 or lam >= 0.0):
                        continue
                elif len(row) >= 2:
                    index, lam = (int(row[0]) if row[0] else None), float(row[1])
                else:
                    index, lam = None, float(row[0])
            except (ValueError, IndexError) as exc:
                raise PotentialFormatError(f"bad tail row {row!r}", row_number) from exc
            rows.append((index, lam))
    return rows
