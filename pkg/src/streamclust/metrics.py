"""Clustering quality metrics and per-run reporting.

Entropy and SSE work on per-record assignments captured while a chunk was
processed, so nothing here requires retained records. Reference centroids for
a labeled stream are the per-class means over all chunks merged; a run is
scored by matching its final centroids against them one-to-one.
"""

import itertools
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Chunk, ClusteringResult, euclidean
from .engine import StepReport

# Exhaustive minimum-cost matching is exact and cheap up to this many
# centroids; beyond it, greedy nearest pairing.
_EXHAUSTIVE_LIMIT = 8


def entropy(assignments) -> float:
    """Size-weighted label entropy of a clustering, in bits; 0 is label-pure.

    assignments: iterable of (cluster index, class label) pairs.
    """
    per_cluster: dict[int, Counter] = defaultdict(Counter)
    total = 0
    for cluster, label in assignments:
        if label is None:
            raise ValueError("entropy needs labeled assignments")
        per_cluster[cluster][label] += 1
        total += 1
    if total == 0:
        raise ValueError("entropy needs at least one assignment")
    value = 0.0
    for counts in per_cluster.values():
        size = sum(counts.values())
        cluster_entropy = -sum(
            (c / size) * math.log2(c / size) for c in counts.values()
        )
        value += (size / total) * cluster_entropy
    return value


def sse(assignments) -> float:
    """Sum of squared record-to-centroid distances at assignment time.

    assignments: iterable of (cluster index, distance) pairs; outliers are
    simply not part of the iterable.
    """
    return sum(d * d for _, d in assignments)


def true_cluster_values(all_chunks: Sequence[Chunk]) -> list[tuple[int, tuple[float, ...]]]:
    """Per-class mean vectors over every chunk merged, sorted by class label."""
    sums: dict[int, np.ndarray] = {}
    counts: dict[int, int] = {}
    for chunk in all_chunks:
        for record in chunk.records:
            if record.label is None:
                raise ValueError("true cluster values need a labeled stream")
            if record.label not in sums:
                sums[record.label] = np.zeros(record.dimensions)
                counts[record.label] = 0
            sums[record.label] += record.values
            counts[record.label] += 1
    return [
        (label, tuple(sums[label] / counts[label])) for label in sorted(sums)
    ]


@dataclass(frozen=True)
class TcvMatch:
    # (cluster index, reference index, distance), sorted by cluster index.
    pairs: tuple[tuple[int, int, float], ...]
    unmatched_clusters: tuple[int, ...]
    unmatched_references: tuple[int, ...]

    @property
    def distances(self) -> tuple[float, ...]:
        return tuple(d for _, _, d in self.pairs)


def tcv_distance(final: ClusteringResult, tcvs: Sequence[Sequence[float]]) -> TcvMatch:
    """Match final centroids to reference centroids, minimizing total distance.

    One-to-one over min(len(clusters), len(tcvs)) pairs: exhaustive search up
    to 8 centroids per side, greedy nearest pairing beyond that. Leftovers on
    either side are reported as unmatched.
    """
    centroids = [c.centroid for c in final.clusters]
    refs = [tuple(float(v) for v in t) for t in tcvs]
    if not refs:
        raise ValueError("need at least one reference centroid")
    dist = [[euclidean(c, r) for r in refs] for c in centroids]
    n, m = len(centroids), len(refs)

    if max(n, m) <= _EXHAUSTIVE_LIMIT:
        if n <= m:
            best = min(
                itertools.permutations(range(m), n),
                key=lambda perm: sum(dist[i][perm[i]] for i in range(n)),
            )
            pairs = [(i, best[i], dist[i][best[i]]) for i in range(n)]
        else:
            best = min(
                itertools.permutations(range(n), m),
                key=lambda perm: sum(dist[perm[j]][j] for j in range(m)),
            )
            pairs = [(best[j], j, dist[best[j]][j]) for j in range(m)]
    else:
        flat = sorted(
            ((dist[i][j], i, j) for i in range(n) for j in range(m))
        )
        used_c: set[int] = set()
        used_r: set[int] = set()
        pairs = []
        for d, i, j in flat:
            if i in used_c or j in used_r:
                continue
            pairs.append((i, j, d))
            used_c.add(i)
            used_r.add(j)
            if len(pairs) == min(n, m):
                break

    pairs.sort()
    matched_c = {i for i, _, _ in pairs}
    matched_r = {j for _, j, _ in pairs}
    return TcvMatch(
        tuple(pairs),
        tuple(i for i in range(n) if i not in matched_c),
        tuple(j for j in range(m) if j not in matched_r),
    )


@dataclass(frozen=True)
class TimestepMetrics:
    timestamp: int
    entropy: float
    sse: float
    cluster_count: int
    outliers: int
    duration_s: float


@dataclass(frozen=True)
class MetricsReport:
    """Per-timestamp metrics plus stream-level aggregates for one run."""

    steps: tuple[TimestepMetrics, ...]
    mean_entropy: float
    mean_sse: float
    total_runtime_s: float
    final_centroids: tuple[tuple[float, ...], ...]
    events: tuple[str, ...]
    tcv: TcvMatch | None = None

    @property
    def cluster_counts(self) -> tuple[int, ...]:
        return tuple(s.cluster_count for s in self.steps)


def step_metrics(
    chunk: Chunk,
    report: StepReport,
    label_sets: Sequence[tuple[int, ...]] | None = None,
) -> TimestepMetrics:
    """Metrics for one processed chunk.

    Labels default to the records' own; when label_sets gives per-record
    artificial class rows, entropy is the unweighted mean over those columns.
    Outliers carry no assignment and contribute to neither metric.
    """
    absorbed = [
        (assignment, i)
        for i, assignment in enumerate(report.assignments)
        if assignment is not None
    ]
    sse_value = sse(a for a, _ in absorbed)
    if not absorbed:
        entropy_value = 0.0
    elif label_sets is None:
        entropy_value = entropy(
            ((cluster, chunk.records[i].label) for (cluster, _), i in absorbed)
        )
    else:
        columns = len(label_sets[0])
        entropy_value = sum(
            entropy(((cluster, label_sets[i][col]) for (cluster, _), i in absorbed))
            for col in range(columns)
        ) / columns
    return TimestepMetrics(
        timestamp=report.timestamp,
        entropy=entropy_value,
        sse=sse_value,
        cluster_count=report.cluster_count,
        outliers=report.outliers,
        duration_s=report.duration_s,
    )


def build_report(
    chunks: Sequence[Chunk],
    reports: Sequence[StepReport],
    final: ClusteringResult,
    ac_sets=None,
    tcvs: Sequence[Sequence[float]] | None = None,
) -> MetricsReport:
    if len(chunks) != len(reports):
        raise ValueError("chunks and step reports must align")
    steps = tuple(
        step_metrics(chunk, rep, ac_sets[i] if ac_sets else None)
        for i, (chunk, rep) in enumerate(zip(chunks, reports))
    )
    return MetricsReport(
        steps=steps,
        mean_entropy=sum(s.entropy for s in steps) / len(steps),
        mean_sse=sum(s.sse for s in steps) / len(steps),
        total_runtime_s=sum(s.duration_s for s in steps),
        final_centroids=tuple(c.centroid for c in final.clusters),
        events=tuple(r.event for r in reports),
        tcv=tcv_distance(final, tcvs) if tcvs else None,
    )


def reports_to_jsonl(runs: Sequence[MetricsReport], meta: dict) -> str:
    """Serialize one or more runs: a meta line, per-timestamp lines averaged
    across runs, and a summary line carrying the per-run payloads."""
    if not runs:
        raise ValueError("need at least one run")
    length = len(runs[0].steps)
    if any(len(r.steps) != length for r in runs):
        raise ValueError("all runs must cover the same timestamps")
    lines = [json.dumps({"type": "meta", **meta})]
    for i in range(length):
        rows = [r.steps[i] for r in runs]
        lines.append(
            json.dumps(
                {
                    "type": "step",
                    "timestamp": rows[0].timestamp,
                    "entropy": sum(s.entropy for s in rows) / len(rows),
                    "sse": sum(s.sse for s in rows) / len(rows),
                    "cluster_count": sum(s.cluster_count for s in rows) / len(rows),
                    "outliers": sum(s.outliers for s in rows) / len(rows),
                    "duration_s": sum(s.duration_s for s in rows) / len(rows),
                }
            )
        )
    summary = {
        "type": "summary",
        "mean_entropy": sum(r.mean_entropy for r in runs) / len(runs),
        "mean_sse": sum(r.mean_sse for r in runs) / len(runs),
        "total_runtime_s": sum(r.total_runtime_s for r in runs) / len(runs),
        "runs": [
            {
                "cluster_counts": list(r.cluster_counts),
                "events": list(r.events),
                "final_centroids": [list(c) for c in r.final_centroids],
                "tcv_distances": list(r.tcv.distances) if r.tcv else None,
                "mean_entropy": r.mean_entropy,
                "mean_sse": r.mean_sse,
                "total_runtime_s": r.total_runtime_s,
            }
            for r in runs
        ],
    }
    lines.append(json.dumps(summary))
    return "\n".join(lines) + "\n"


def parse_jsonl(text: str) -> tuple[dict, list[dict], dict]:
    """Split a serialized report back into (meta, step rows, summary)."""
    meta: dict = {}
    steps: list[dict] = []
    summary: dict = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        kind = doc.get("type")
        if kind == "meta":
            meta = doc
        elif kind == "step":
            steps.append(doc)
        elif kind == "summary":
            summary = doc
    if not summary:
        raise ValueError("report has no summary line")
    return meta, steps, summary
