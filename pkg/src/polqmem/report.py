"""Run reports: tables written as CSV plus a JSON metadata sidecar."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import PolqmemError

HASH_COLUMN = "config_hash"


class HashMismatchError(PolqmemError):
    pass


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


@dataclass
class RunReport:
    name: str
    config_hash: str
    seed: int
    tables: dict[str, Table] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    config_text: str = ""

    @property
    def metadata(self) -> dict:
        return {
            "experiment": self.name,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "version": __version__,
            "tables": sorted(self.tables),
            "summary": self.summary,
        }


def _format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def table_to_csv(table: Table, config_hash: str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns + [HASH_COLUMN])
    for row in table.rows:
        writer.writerow([_format_cell(v) for v in row] + [config_hash])
    return buf.getvalue()


def write_report(report: RunReport, out_dir) -> list[Path]:
    """Write ``<table>.csv`` per table and ``<name>.meta.json``; returns the CSV paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, table in report.tables.items():
        p = out / f"{name}.csv"
        p.write_text(table_to_csv(table, report.config_hash), encoding="utf-8")
        paths.append(p)
    meta = dict(report.metadata, config=report.config_text)
    (out / f"{report.name}.meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True, default=float) + "\n", encoding="utf-8")
    return paths


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def check_consistent_hash(paths) -> str:
    """Return the shared config hash of several CSV files or raise ``HashMismatchError``."""
    seen = {}
    for p in paths:
        header, rows = read_csv(p)
        if HASH_COLUMN not in header:
            raise HashMismatchError(f"{p}: no {HASH_COLUMN} column")
        i = header.index(HASH_COLUMN)
        for r in rows:
            seen.setdefault(r[i], str(p))
    if len(seen) != 1:
        detail = ", ".join(f"{h} ({p})" for h, p in seen.items())
        raise HashMismatchError(f"config hashes differ across outputs: {detail}")
    return next(iter(seen))
