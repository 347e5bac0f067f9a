"""Single-pass absorption of a chunk into an existing set of cluster summaries.

Each record goes to its nearest centroid if it falls within that cluster's
radius, nudging the centroid by a running mean; otherwise it counts as an
outlier and is discarded. Radii never change here, so clusters cannot inflate
between retrains. The pass is inherently sequential: centroids move as records
arrive, and the same input order always yields bit-identical output.
"""

import math

from .core import Chunk, ClusteringResult, ClusterSummary, Record

# (cluster index, distance at assignment time) per record, None for outliers.
Assignment = tuple[int, float] | None


def closest_cluster(record: Record, result: ClusteringResult) -> tuple[int, float]:
    """Index and distance of the centroid nearest to the record.

    Ties break toward the lowest cluster index.
    """
    if not result.clusters:
        raise ValueError("result has no clusters")
    values = record.values
    best = 0
    best_dist = math.dist(values, result.clusters[0].centroid)
    for idx in range(1, len(result.clusters)):
        d = math.dist(values, result.clusters[idx].centroid)
        if d < best_dist:
            best, best_dist = idx, d
    return best, best_dist


def _shift_centroid(centroid, values, updated_lifetime: int) -> tuple[float, ...]:
    # updated_lifetime is the count *after* absorbing the record; its
    # reciprocal is the learning rate.
    w = 1.0 / updated_lifetime
    keep = 1.0 - w
    return tuple(keep * c + w * v for c, v in zip(centroid, values))


def update_centroid(summary: ClusterSummary, record: Record) -> ClusterSummary:
    """Absorb one record: bump both counters, shift the centroid by 1/count.

    new centroid_i = (1 - 1/n) * centroid_i + (1/n) * value_i with n already
    incremented, which keeps the centroid an exact running mean. The radius is
    left alone.
    """
    if record.dimensions != len(summary.centroid):
        raise ValueError(
            f"record has {record.dimensions} dimensions, centroid has {len(summary.centroid)}"
        )
    lifetime = summary.lifetime_count + 1
    return ClusterSummary(
        _shift_centroid(summary.centroid, record.values, lifetime),
        summary.radius,
        lifetime,
        summary.chunk_count + 1,
    )


def dist_clust_trace(chunk: Chunk, prev: ClusteringResult) -> tuple[ClusteringResult, tuple[Assignment, ...]]:
    """dist_clust() plus the per-record (cluster, distance) assignments."""
    if chunk.dimensions != prev.dimensions:
        raise ValueError(
            f"chunk has {chunk.dimensions} dimensions, clusters have {prev.dimensions}"
        )
    centroids = [c.centroid for c in prev.clusters]
    radii = [c.radius for c in prev.clusters]
    lifetimes = [c.lifetime_count for c in prev.clusters]
    deltas = [0] * len(prev.clusters)  # per-chunk counts restart each call
    outliers = 0
    trace: list[Assignment] = []

    dist = math.dist
    for record in chunk.records:
        values = record.values
        best = 0
        best_dist = dist(values, centroids[0])
        for idx in range(1, len(centroids)):
            d = dist(values, centroids[idx])
            if d < best_dist:
                best, best_dist = idx, d
        if best_dist <= radii[best]:
            lifetimes[best] += 1
            deltas[best] += 1
            centroids[best] = _shift_centroid(centroids[best], values, lifetimes[best])
            trace.append((best, best_dist))
        else:
            outliers += 1
            trace.append(None)

    clusters = tuple(
        ClusterSummary(centroids[i], radii[i], lifetimes[i], deltas[i])
        for i in range(len(centroids))
    )
    return ClusteringResult(clusters, outliers, chunk.timestamp), tuple(trace)


def dist_clust(chunk: Chunk, prev: ClusteringResult) -> ClusteringResult:
    """Absorb a chunk into the previous result and return the updated one.

    Starts from prev's clusters with every per-chunk count and the outlier
    counter reset to zero (prev itself is never mutated, so its counts remain
    available for drift comparison). Records are processed in chunk order:
    nearest centroid wins, absorption requires distance <= that cluster's
    radius, everything else is counted as an outlier and dropped.
    """
    result, _ = dist_clust_trace(chunk, prev)
    return result
