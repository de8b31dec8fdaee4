"""Result tables, run manifests, and the cell cache behind the CLI.

Output files must be byte-identical across reruns and across thread counts,
so every float is written with its shortest round-trip repr, rows are always
emitted in cell-index order, and files are written atomically (temp file plus
rename).  The manifest records the exact parameter map and its content hash;
the hash covers the canonicalised parameters only, never the timestamp.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

__all__ = [
    "ResultTable",
    "RunManifest",
    "canonical_params",
    "manifest_hash",
    "atomic_write_text",
    "write_csv",
    "CellCache",
]


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (int, str)):
        return str(value)
    raise TypeError(f"unsupported cell type {type(value).__name__}")


@dataclass(frozen=True)
class ResultTable:
    """Homogeneous typed rows with one unit label per column."""

    columns: tuple[str, ...]
    units: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("need exactly one unit per column")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row arity does not match the column count")
            for cell in row:
                if cell is None:
                    raise ValueError("tables cannot have missing cells")

    def __len__(self) -> int:
        return len(self.rows)


def atomic_write_text(path: Path, text: str) -> None:
    """Write file contents via a temp file and rename, never a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def write_csv(path: Path, table: ResultTable,
              footer: Sequence[Sequence[Any]] = ()) -> None:
    """Emit an RFC-4180-style CSV with full round-trip float precision.

    Footer rows (for fitted summaries) are appended verbatim after the data
    rows; they may have a different arity.
    """
    import io

    buffer = io.StringIO()
    writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_format_value(cell) for cell in row])
    for row in footer:
        writer.writerow([_format_value(cell) for cell in row])
    atomic_write_text(Path(path), buffer.getvalue())


def canonical_params(params: dict[str, Any]) -> str:
    """Canonical JSON of a parameter map: sorted keys, no whitespace."""
    return json.dumps(params, sort_keys=True, separators=(",", ":"))


def manifest_hash(params: dict[str, Any]) -> str:
    """Deterministic content hash of the canonicalised parameter map."""
    return hashlib.sha256(canonical_params(params).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """What produced the files sitting next to this manifest."""

    command: str
    params: dict[str, Any]
    hash: str
    version: str
    timestamp: str
    outputs: tuple[str, ...]

    @classmethod
    def create(cls, command: str, params: dict[str, Any], version: str,
               outputs: Iterable[str]) -> "RunManifest":
        return cls(command=command, params=dict(params),
                   hash=manifest_hash(params), version=version,
                   timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                   outputs=tuple(outputs))

    def write(self, directory: Path) -> Path:
        path = Path(directory) / "manifest.json"
        payload = {
            "command": self.command,
            "params": self.params,
            "hash": self.hash,
            "version": self.version,
            "timestamp": self.timestamp,
            "outputs": list(self.outputs),
        }
        atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path


class CellCache:
    """Disk cache of computed sweep rows, keyed by exact parameter hash.

    A cached entry is reused only when the requesting run's hash matches the
    stored key byte for byte; any parameter change misses.
    """

    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str):
        path = self._path(key)
        if not path.exists():
            return None
        with open(path, "r") as handle:
            stored = json.load(handle)
        if stored.get("key") != key:
            return None
        return stored.get("rows")

    def put(self, key: str, rows) -> None:
        payload = json.dumps({"key": key, "rows": rows}, sort_keys=True)
        atomic_write_text(self._path(key), payload)
