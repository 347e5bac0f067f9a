"""File formats: one CSV per chunk plus a JSON manifest, and dataset loading.

Floats are written with repr() so that parsing them back yields bit-identical
values; regenerating a stream from the same seed produces byte-identical
files. All writes go through a temp file and os.replace, so a failed write
never leaves a half-written file behind.
"""

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .core import Chunk, Record

MANIFEST_NAME = "manifest.json"
MANIFEST_FORMAT = "streamclust-stream"
MANIFEST_VERSION = 1


def _tool_version() -> str:
    from . import __version__

    return __version__


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _chunk_file_name(timestamp: int) -> str:
    return f"chunk_{timestamp:05d}.csv"


def write_stream(
    directory,
    chunks: Sequence[Chunk],
    *,
    seed: int,
    origin: str = "synthetic",
    source: dict | None = None,
    ac_sets: Sequence[Sequence[tuple[int, ...]]] | None = None,
) -> Path:
    """Write chunk files and a manifest; returns the manifest path.

    ac_sets, when given, holds one row of artificial class labels per record
    per chunk; they are stored as extra columns after the label column.
    """
    if origin not in ("synthetic", "real-world"):
        raise ValueError(f"origin must be 'synthetic' or 'real-world', got {origin!r}")
    chunks = list(chunks)
    if not chunks:
        raise ValueError("cannot write an empty stream")
    if ac_sets is not None and len(ac_sets) != len(chunks):
        raise ValueError("ac_sets must align with chunks")

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    dims = chunks[0].dimensions
    ac_count = len(ac_sets[0][0]) if ac_sets else 0
    header = [f"a{i + 1}" for i in range(dims)] + ["label"]
    header += [f"ac{i + 1}" for i in range(ac_count)]

    names = []
    for pos, chunk in enumerate(chunks):
        rows = []
        for j, record in enumerate(chunk.records):
            row = [repr(v) for v in record.values]
            row.append("" if record.label is None else str(record.label))
            if ac_sets:
                row.extend(str(v) for v in ac_sets[pos][j])
            rows.append(row)
        name = _chunk_file_name(chunk.timestamp)
        names.append(name)
        lines = [",".join(header)] + [",".join(r) for r in rows]
        atomic_write_text(directory / name, "\n".join(lines) + "\n")

    manifest = {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "tool_version": _tool_version(),
        "origin": origin,
        "seed": seed,
        "dimensions": dims,
        "chunk_count": len(chunks),
        "chunks": names,
        "artificial_class_sets": ac_count,
        "source": source or {},
    }
    manifest_path = directory / MANIFEST_NAME
    atomic_write_text(manifest_path, json.dumps(manifest, indent=2) + "\n")
    return manifest_path


@dataclass(frozen=True)
class StreamData:
    chunks: tuple[Chunk, ...]
    manifest: dict
    # Per chunk: per record: tuple of artificial class labels, or None.
    ac_sets: tuple[tuple[tuple[int, ...], ...], ...] | None

    @property
    def origin(self) -> str:
        return self.manifest.get("origin", "synthetic")


def load_stream(manifest_path) -> StreamData:
    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if manifest.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"{manifest_path} is not a {MANIFEST_FORMAT} manifest")
    if manifest.get("version") != MANIFEST_VERSION:
        raise ValueError(f"unsupported manifest version {manifest.get('version')!r}")
    dims = manifest["dimensions"]
    ac_count = manifest.get("artificial_class_sets", 0)

    chunks = []
    ac_sets = []
    for t, name in enumerate(manifest["chunks"], start=1):
        path = manifest_path.parent / name
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or len(rows) < 2:
            raise ValueError(f"chunk file {path} is empty")
        records = []
        ac_rows = []
        for row in rows[1:]:
            values = tuple(float(v) for v in row[:dims])
            label = int(row[dims]) if row[dims] != "" else None
            records.append(Record(values, label))
            if ac_count:
                ac_rows.append(tuple(int(v) for v in row[dims + 1 : dims + 1 + ac_count]))
        chunks.append(Chunk(t, tuple(records)))
        ac_sets.append(tuple(ac_rows))
    return StreamData(tuple(chunks), manifest, tuple(ac_sets) if ac_count else None)


def _looks_numeric(field: str) -> bool:
    try:
        float(field)
        return True
    except ValueError:
        return False


def load_dataset(path, delimiter: str | None = None) -> tuple[list[Record], dict[str, int]]:
    """Read a delimiter-separated dataset whose last column is the class label.

    The delimiter is sniffed when not given, a header row is skipped when the
    first row is not fully numeric, and non-integer labels are mapped to
    integers in first-appearance order. Returns (records, label mapping).
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path} is empty")
    if delimiter is None:
        try:
            delimiter = csv.Sniffer().sniff(lines[0], delimiters=",;\t ").delimiter
        except csv.Error:
            delimiter = ","
    rows = list(csv.reader(lines, delimiter=delimiter))
    rows = [[f.strip() for f in row] for row in rows if row]
    start = 0
    if not all(_looks_numeric(f) for f in rows[0][:-1]):
        start = 1
    if start >= len(rows):
        raise ValueError(f"{path} has no data rows")

    width = len(rows[start])
    if width < 2:
        raise ValueError("dataset needs at least one attribute column plus a label")
    records = []
    label_map: dict[str, int] = {}
    for i, row in enumerate(rows[start:], start=start + 1):
        if len(row) != width:
            raise ValueError(f"{path} row {i}: expected {width} fields, got {len(row)}")
        try:
            values = tuple(float(v) for v in row[:-1])
        except ValueError as exc:
            raise ValueError(f"{path} row {i}: non-numeric attribute ({exc})") from None
        raw = row[-1]
        try:
            label = int(float(raw))
        except ValueError:
            label = label_map.setdefault(raw, len(label_map))
        records.append(Record(values, label))
    return records, label_map
