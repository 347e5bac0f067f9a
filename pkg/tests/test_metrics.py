import math

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from streamclust import (
    Chunk,
    ClusteringResult,
    ClusterSummary,
    DriftConfig,
    Record,
    build_report,
    dist_clust_trace,
    engine,
    entropy,
    generate_synthetic,
    sdccl_spec,
    sse,
    summarize,
    tcv_distance,
    true_cluster_values,
)
from streamclust.metrics import parse_jsonl, reports_to_jsonl
from streamclust.streams import BASE_ANCHORS
from conftest import labels_k


def test_entropy_pure_clusters():
    assignments = [(0, 1), (0, 1), (1, 2), (1, 2), (2, 3)]
    assert entropy(assignments) == 0.0


def test_entropy_uniform_binary():
    assert entropy([(0, 1), (0, 2)]) == pytest.approx(1.0)


def test_entropy_weighted_mixture():
    # cluster 0: labels {a:3, b:1}; cluster 1: {b:4} -> 0.5 * H(3/4,1/4)
    assignments = [(0, "a")] * 3 + [(0, "b")] + [(1, "b")] * 4
    assert entropy(assignments) == pytest.approx(0.4056390622295664, abs=1e-12)


def test_entropy_invariant_under_relabeling():
    rng = np.random.default_rng(8)
    assignments = [(int(c), int(l)) for c, l in rng.integers(0, 4, size=(200, 2))]
    base = entropy(assignments)
    relabel = {0: 13, 1: 7, 2: 99, 3: -2}
    recluster = {0: 3, 1: 2, 2: 1, 3: 0}
    assert entropy([(c, relabel[l]) for c, l in assignments]) == pytest.approx(base)
    assert entropy([(recluster[c], l) for c, l in assignments]) == pytest.approx(base)


def test_entropy_validation():
    with pytest.raises(ValueError):
        entropy([])
    with pytest.raises(ValueError):
        entropy([(0, None)])


def test_sse_zero_for_coincident_records():
    assert sse([(0, 0.0), (1, 0.0)]) == 0.0


def test_sse_squares_distances():
    assert sse([(0, 0.5), (1, 0.5)]) == pytest.approx(0.5)


def test_sse_online_equals_offline_replay():
    rng = np.random.default_rng(19)
    base = Chunk(1, tuple(Record(tuple(r)) for r in rng.uniform(0, 1, (20, 2))))
    from streamclust import KMeansParams

    prev = summarize(base, KMeansParams(k=2, seed=0))
    chunk = Chunk(2, tuple(Record(tuple(r)) for r in rng.uniform(0, 1, (40, 2))))
    _, trace = dist_clust_trace(chunk, prev)
    online = sse(a for a in trace if a is not None)

    # oracle: replay the pass with retained records and an evolving centroid
    centroids = [list(c.centroid) for c in prev.clusters]
    lifetimes = [c.lifetime_count for c in prev.clusters]
    radii = [c.radius for c in prev.clusters]
    offline = 0.0
    for record in chunk.records:
        dists = [math.dist(record.values, c) for c in centroids]
        best = dists.index(min(dists))
        if dists[best] <= radii[best]:
            offline += dists[best] ** 2
            lifetimes[best] += 1
            w = 1.0 / lifetimes[best]
            centroids[best] = [
                (1 - w) * c + w * v for c, v in zip(centroids[best], record.values)
            ]
    assert online == pytest.approx(offline, abs=1e-9)


def test_true_cluster_values_single_class():
    chunks = [Chunk(1, (Record((0.2, 0.4), 1), Record((0.4, 0.6), 1)))]
    assert true_cluster_values(chunks) == [(1, (0.30000000000000004, 0.5))]


def test_true_cluster_values_symmetric_midpoint():
    chunks = [
        Chunk(1, (Record((0.0, 0.0), 1), Record((0.5, 0.5), 2))),
        Chunk(2, (Record((1.0, 1.0), 1), Record((0.7, 0.3), 2))),
    ]
    tcvs = dict(true_cluster_values(chunks))
    assert tcvs[1] == pytest.approx((0.5, 0.5))
    assert tcvs[2] == pytest.approx((0.6, 0.4))


def test_true_cluster_values_requires_labels():
    with pytest.raises(ValueError):
        true_cluster_values([Chunk(1, (Record((0.1,)),))])


def test_sdccl_class_means_sit_on_the_anchors():
    chunks = generate_synthetic(sdccl_spec(seed=7))
    tcvs = dict(true_cluster_values(chunks))
    assert set(tcvs) == {0, 1, 2, 3, 4, 5}
    # each class mean pools 180 draws at sigma 0.02 (the +/- relocation
    # offsets cancel), so deviations sit within ~5 standard errors: 0.0075
    for label, anchor in zip(range(1, 6), BASE_ANCHORS):
        assert math.dist(tcvs[label], anchor) < 0.0075


def _final(centroids):
    return ClusteringResult(
        tuple(ClusterSummary(c, 0.1, 10, 0) for c in centroids), 0, 1
    )


def test_tcv_distance_exact_match():
    refs = [(0.1, 0.1), (0.9, 0.9), (0.5, 0.5)]
    match = tcv_distance(_final(refs), refs)
    assert match.distances == (0.0, 0.0, 0.0)
    assert match.unmatched_clusters == () and match.unmatched_references == ()


def test_tcv_distance_single_offset():
    match = tcv_distance(_final([(0.53, 0.54)]), [(0.5, 0.5)])
    assert match.distances[0] == pytest.approx(0.05)


def test_tcv_distance_matches_hungarian_oracle():
    rng = np.random.default_rng(33)
    for _ in range(30):
        centroids = [tuple(c) for c in rng.uniform(0, 1, size=(5, 2))]
        refs = [tuple(c) for c in rng.uniform(0, 1, size=(5, 2))]
        match = tcv_distance(_final(centroids), refs)
        cost = np.array([[math.dist(c, r) for r in refs] for c in centroids])
        rows, cols = linear_sum_assignment(cost)
        assert sum(match.distances) == pytest.approx(cost[rows, cols].sum(), abs=1e-12)


def test_tcv_distance_partial_when_counts_differ():
    centroids = [(0.1, 0.1), (0.9, 0.9)]
    refs = [(0.1, 0.1), (0.9, 0.9), (0.5, 0.5)]
    match = tcv_distance(_final(centroids), refs)
    assert len(match.pairs) == 2
    assert match.unmatched_references == (2,)
    match = tcv_distance(_final(refs), refs[:2])
    assert len(match.pairs) == 2
    assert match.unmatched_clusters == (2,)


def test_tcv_distance_greedy_path_for_many_clusters():
    rng = np.random.default_rng(3)
    pts = [tuple(c) for c in rng.uniform(0, 1, size=(12, 2))]
    match = tcv_distance(_final(pts), pts)
    assert match.distances == (0.0,) * 12


def test_build_report_and_jsonl_round_trip():
    chunks = generate_synthetic(sdccl_spec(seed=7))
    cfg = DriftConfig(k=5, seed=7)
    state, reports = engine.run(chunks, cfg, labels_k)
    tcvs = [c for _, c in true_cluster_values(chunks)]
    report = build_report(chunks, reports, state.main, tcvs=tcvs)

    assert len(report.steps) == 7
    assert report.cluster_counts == (5, 5, 5, 5, 1, 5, 5)
    assert report.events.count("activated") == 1
    assert report.mean_sse >= 0.0
    assert report.total_runtime_s > 0.0
    assert all(s.duration_s > 0.0 for s in report.steps)
    assert report.tcv is not None and len(report.tcv.pairs) == 5

    text = reports_to_jsonl([report], {"note": "unit"})
    meta, steps, summary = parse_jsonl(text)
    assert meta["note"] == "unit"
    assert len(steps) == 7
    assert steps[0]["timestamp"] == 1
    assert summary["runs"][0]["cluster_counts"] == [5, 5, 5, 5, 1, 5, 5]
    assert summary["runs"][0]["tcv_distances"] == list(report.tcv.distances)


def test_step_metrics_averages_artificial_label_sets():
    from streamclust import step_metrics

    chunks = generate_synthetic(sdccl_spec(seed=7))[:1]
    cfg = DriftConfig(k=5, seed=7)
    state, reports = engine.run(chunks, cfg, labels_k)
    records = chunks[0].records
    # two artificial label columns: one equal to the true labels (entropy 0),
    # one constant (entropy of a single shared label is also 0 per cluster)
    sets = [(r.label, 1) for r in records]
    metrics = step_metrics(chunks[0], reports[0], sets)
    assert metrics.entropy == pytest.approx(0.0)
    assert metrics.cluster_count == 5
