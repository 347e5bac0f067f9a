"""Shared domain types and numeric primitives.

Every type here is an immutable value object; the functions are pure. That
makes results safe to hand between threads and trivially comparable in tests.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Record:
    """One observation: numeric attribute values plus an optional class label.

    Labels are opaque integers used only by stream construction and external
    evaluation; no clustering code path ever reads them.
    """

    values: tuple[float, ...]
    label: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("Record needs at least one attribute value")

    @property
    def dimensions(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Chunk:
    """A timestamped batch of records, the unit of incremental processing."""

    timestamp: int
    records: tuple[Record, ...]

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if self.timestamp < 1:
            raise ValueError(f"chunk timestamp must be >= 1, got {self.timestamp}")
        if not self.records:
            raise ValueError("Chunk needs at least one record")
        first = self.records[0].dimensions
        if any(r.dimensions != first for r in self.records):
            raise ValueError("all records in a chunk must share dimensionality")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def dimensions(self) -> int:
        return self.records[0].dimensions


@dataclass(frozen=True)
class ClusterSummary:
    """Compact stand-in for a cluster once its records are discarded.

    centroid        running mean of every record the cluster absorbed
    radius          absorption threshold, fixed when the cluster was built
    lifetime_count  records absorbed over the cluster's whole life
    chunk_count     records absorbed from the current chunk only
    """

    centroid: tuple[float, ...]
    radius: float
    lifetime_count: int
    chunk_count: int

    def __post_init__(self):
        object.__setattr__(self, "centroid", tuple(float(v) for v in self.centroid))
        if not self.centroid:
            raise ValueError("centroid must be non-empty")
        if self.radius < 0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")
        if self.lifetime_count < 1:
            raise ValueError("lifetime_count must be >= 1")
        if not 0 <= self.chunk_count <= self.lifetime_count:
            raise ValueError("chunk_count must satisfy 0 <= chunk_count <= lifetime_count")


@dataclass(frozen=True)
class ClusteringResult:
    """A set of cluster summaries plus the outlier count for one timestamp."""

    clusters: tuple[ClusterSummary, ...]
    outliers: int
    timestamp: int

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(self.clusters))
        if not self.clusters:
            raise ValueError("ClusteringResult needs at least one cluster")
        if self.outliers < 0:
            raise ValueError("outliers must be >= 0")

    @property
    def dimensions(self) -> int:
        return len(self.clusters[0].centroid)


@dataclass(frozen=True)
class DriftConfig:
    """Tuning knobs shared by the drift detector and the engine.

    o_thresh is the maximum tolerated outlier ratio per chunk, d_thresh the
    maximum tolerated per-cluster distribution change; seed controls every
    internal k-means bootstrap so runs are reproducible.
    """

    k: int
    o_thresh: float = 0.18
    d_thresh: float = 0.6
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0 < self.o_thresh <= 1:
            raise ValueError(f"o_thresh must be in (0, 1], got {self.o_thresh}")
        if self.d_thresh <= 0:
            raise ValueError(f"d_thresh must be > 0, got {self.d_thresh}")


def euclidean(a, b) -> float:
    """Euclidean distance between two equal-length vectors."""
    return math.dist(a, b)


def minmax_normalize(dataset) -> list[Record]:
    """Rescale every attribute column to [0, 1] using the column min/max.

    Statistics come from the whole dataset, so call this before chunking.
    Constant columns map to 0 rather than dividing by zero. Labels pass
    through untouched.
    """
    records = list(dataset)
    if not records:
        raise ValueError("cannot normalize an empty dataset")
    dims = records[0].dimensions
    if any(r.dimensions != dims for r in records):
        raise ValueError("all records must share dimensionality")

    matrix = np.array([r.values for r in records], dtype=float)
    lo = matrix.min(axis=0)
    span = matrix.max(axis=0) - lo
    keep = span > 0
    scaled = np.where(keep, (matrix - lo) / np.where(keep, span, 1.0), 0.0)
    return [
        Record(tuple(row), rec.label) for row, rec in zip(scaled, records)
    ]
