"""Command-line front end: generate streams, run the engine, score results.

Commands:
    gen     write a named or file-defined synthetic stream to disk
    chunk   normalize and split a labeled dataset file into a stream
    run     drive the engine over a stream, write metrics (optionally repeat
            with derived seeds and average)
    eval    match a run's final centroids against the stream's per-class means
    resume  continue a run from a saved engine snapshot

Every command is deterministic given explicit seeds; --seed defaults to the
fixed constant 7, never the clock. The drift thresholds default to 0.18 /
0.6, with 0.4 instead of 0.6 for streams whose manifest says "real-world".
"""

import argparse
import json
import sys
from pathlib import Path

from . import __version__, engine
from .core import Chunk, DriftConfig, minmax_normalize
from .metrics import (
    build_report,
    parse_jsonl,
    reports_to_jsonl,
    tcv_distance,
    true_cluster_values,
)
from .stream_io import (
    atomic_write_text,
    load_dataset,
    load_stream,
    write_stream,
)
from .streams import (
    DriftKind,
    NAMED_SPECS,
    StreamSpec,
    TimestepSpec,
    chunk_indices,
    generate_synthetic,
    make_artificial_classes,
)

DEFAULT_SEED = 7
DEFAULT_O_THRESH = 0.18
DEFAULT_D_THRESH_SYNTHETIC = 0.6
DEFAULT_D_THRESH_REAL = 0.4


def _labels_k(chunk: Chunk) -> int:
    # The per-chunk "k from unique labels" policy lives here, outside the
    # engine, which never reads labels itself.
    labels = {r.label for r in chunk.records}
    if None in labels:
        raise ValueError("k-from-labels policy needs a fully labeled stream")
    return len(labels)


def _spec_from_file(path: Path, seed: int) -> StreamSpec:
    doc = json.loads(path.read_text(encoding="utf-8"))
    entries = tuple(
        TimestepSpec(
            cluster_count=e["cluster_count"],
            records_per_cluster=(
                tuple(e["records_per_cluster"])
                if isinstance(e["records_per_cluster"], list)
                else e["records_per_cluster"]
            ),
            drift_kind=DriftKind(e.get("drift_kind", "none")),
            offset_steps=e.get("offset_steps", 0),
        )
        for e in doc["entries"]
    )
    kwargs = {}
    for key in ("sigma", "relocate_offset"):
        if key in doc:
            kwargs[key] = doc[key]
    for key in ("anchors", "alt_anchors"):
        if key in doc:
            kwargs[key] = tuple(tuple(a) for a in doc[key])
    return StreamSpec(entries, seed=doc.get("seed", seed), **kwargs)


def _spec_to_source(spec: StreamSpec, name: str) -> dict:
    return {
        "kind": "generated",
        "name": name,
        "sigma": spec.sigma,
        "relocate_offset": spec.relocate_offset,
        "entries": [
            {
                "cluster_count": e.cluster_count,
                "records_per_cluster": list(e.cluster_sizes),
                "drift_kind": e.drift_kind.value,
                "offset_steps": e.offset_steps,
            }
            for e in spec.entries
        ],
    }


def cmd_gen(args) -> int:
    name = args.spec
    if name in NAMED_SPECS:
        spec = NAMED_SPECS[name](seed=args.seed)
    else:
        path = Path(name)
        if not path.exists():
            raise ValueError(
                f"unknown stream spec {name!r}; pick one of {sorted(NAMED_SPECS)} or give a JSON file"
            )
        spec = _spec_from_file(path, args.seed)
        name = path.stem
    out = Path(args.out) if args.out else Path(f"{name}_seed{spec.seed}")
    chunks = generate_synthetic(spec)
    manifest = write_stream(
        out, chunks, seed=spec.seed, origin="synthetic", source=_spec_to_source(spec, name)
    )
    print(manifest)
    return 0


def cmd_chunk(args) -> int:
    records, label_map = load_dataset(args.dataset)
    if args.normalize:
        records = minmax_normalize(records)
    parts = chunk_indices([r.label for r in records], args.chunks)
    chunks = [
        Chunk(i + 1, tuple(records[p] for p in part)) for i, part in enumerate(parts)
    ]
    ac_sets = None
    if args.artificial_classes:
        class_count = len({r.label for r in records})
        ac_all = make_artificial_classes(records, class_count)
        ac_sets = [[ac_all[p] for p in part] for part in parts]
    out = Path(args.out) if args.out else Path(Path(args.dataset).stem + "_stream")
    manifest = write_stream(
        out,
        chunks,
        seed=0,
        origin="real-world",
        source={
            "kind": "dataset",
            "file": Path(args.dataset).name,
            "records": len(records),
            "classes": len({r.label for r in records}),
            "label_map": label_map,
            "normalized": bool(args.normalize),
        },
        ac_sets=ac_sets,
    )
    print(manifest)
    return 0


def _run_stream(data, config: DriftConfig, fixed_k: int | None, stop_after: int | None):
    chunks = list(data.chunks)
    if stop_after is not None:
        if not 1 <= stop_after <= len(chunks):
            raise ValueError(f"--stop-after must be in 1..{len(chunks)}")
        chunks = chunks[:stop_after]
    k_fn = None if fixed_k is not None else _labels_k
    state, reports = engine.run(chunks, config, k_fn)
    return chunks, state, reports


def cmd_run(args) -> int:
    data = load_stream(args.manifest)
    d_thresh = args.d_thresh
    if d_thresh is None:
        d_thresh = (
            DEFAULT_D_THRESH_REAL if data.origin == "real-world" else DEFAULT_D_THRESH_SYNTHETIC
        )
    if args.snapshot and args.repeat != 1:
        raise ValueError("--snapshot requires --repeat 1")
    if args.stop_after is not None and args.repeat != 1:
        raise ValueError("--stop-after requires --repeat 1")

    base_k = args.k if args.k is not None else _labels_k(data.chunks[0])
    tcvs = [c for _, c in true_cluster_values(data.chunks)]

    runs = []
    final_state = None
    for i in range(args.repeat):
        config = DriftConfig(
            k=base_k, o_thresh=args.o_thresh, d_thresh=d_thresh, seed=args.seed + i
        )
        chunks, state, reports = _run_stream(data, config, args.k, args.stop_after)
        ac = list(data.ac_sets[: len(chunks)]) if data.ac_sets else None
        runs.append(build_report(chunks, reports, state.main, ac, tcvs))
        final_state = state

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "tool_version": __version__,
        "manifest": str(Path(args.manifest).resolve()),
        "k": args.k,
        "k_policy": "fixed" if args.k is not None else "labels",
        "o_thresh": args.o_thresh,
        "d_thresh": d_thresh,
        "seed": args.seed,
        "repeat": args.repeat,
        "stop_after": args.stop_after,
    }
    metrics_path = out / "metrics.jsonl"
    atomic_write_text(metrics_path, reports_to_jsonl(runs, meta))

    counts_path = out / "cluster_counts.tsv"
    lines = [f"# streamclust {__version__} seed={args.seed} repeat={args.repeat}"]
    for i, step in enumerate(runs[0].steps):
        mean_count = sum(r.steps[i].cluster_count for r in runs) / len(runs)
        lines.append(f"{step.timestamp}\t{mean_count:g}")
    atomic_write_text(counts_path, "\n".join(lines) + "\n")

    if args.snapshot:
        atomic_write_text(Path(args.snapshot), engine.state_to_json(final_state) + "\n")

    mean_entropy = sum(r.mean_entropy for r in runs) / len(runs)
    mean_sse = sum(r.mean_sse for r in runs) / len(runs)
    total = sum(r.total_runtime_s for r in runs) / len(runs)
    print(
        f"runs={args.repeat} mean_entropy={mean_entropy:.6f} mean_sse={mean_sse:.6f} "
        f"total_runtime_s={total:.4f}"
    )
    print(metrics_path)
    return 0


def cmd_resume(args) -> int:
    data = load_stream(args.manifest)
    state = engine.state_from_json(Path(args.snapshot).read_text(encoding="utf-8"))
    remaining = [c for c in data.chunks if c.timestamp > state.timestamp]
    if not remaining:
        raise ValueError(
            f"snapshot already covers t={state.timestamp}; nothing left to process"
        )
    k_fn = None if args.k is not None else _labels_k
    reports = []
    for chunk in remaining:
        state, report = engine.step(state, chunk, args.k if args.k is not None else k_fn(chunk))
        reports.append(report)

    tcvs = [c for _, c in true_cluster_values(data.chunks)]
    offset = len(data.chunks) - len(remaining)
    ac = list(data.ac_sets[offset:]) if data.ac_sets else None
    run_report = build_report(remaining, reports, state.main, ac, tcvs)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "tool_version": __version__,
        "manifest": str(Path(args.manifest).resolve()),
        "seed": state.config.seed,
        "resumed_after": remaining[0].timestamp - 1,
        "k": args.k,
        "k_policy": "fixed" if args.k is not None else "labels",
    }
    metrics_path = out / "metrics.jsonl"
    atomic_write_text(metrics_path, reports_to_jsonl([run_report], meta))
    if args.snapshot_out:
        atomic_write_text(Path(args.snapshot_out), engine.state_to_json(state) + "\n")
    print(metrics_path)
    return 0


def cmd_eval(args) -> int:
    data = load_stream(args.manifest)
    _, steps, summary = parse_jsonl(Path(args.report).read_text(encoding="utf-8"))
    if len(steps) > len(data.chunks):
        raise ValueError(
            f"report covers {len(steps)} timestamps but the stream has {len(data.chunks)} chunks"
        )
    runs = summary.get("runs") or []
    if not (0 <= args.run < len(runs)):
        raise ValueError(f"report has {len(runs)} runs; --run {args.run} is out of range")
    centroids = [tuple(c) for c in runs[args.run]["final_centroids"]]
    if centroids and len(centroids[0]) != data.chunks[0].dimensions:
        raise ValueError(
            "report centroids do not match the stream's dimensionality; "
            "wrong manifest/report pair?"
        )

    labeled = true_cluster_values(data.chunks)
    from .core import ClusteringResult, ClusterSummary

    final = ClusteringResult(
        tuple(ClusterSummary(c, 0.0, 1, 0) for c in centroids), 0, len(steps)
    )
    match = tcv_distance(final, [c for _, c in labeled])

    dims = len(centroids[0])
    head = ["cluster"]
    head += [f"tcv_x{d + 1}" for d in range(dims)]
    head += [f"found_x{d + 1}" for d in range(dims)]
    head.append("distance")
    print("\t".join(head))
    for cluster_idx, ref_idx, distance in match.pairs:
        label, ref = labeled[ref_idx]
        row = [f"C{cluster_idx + 1}"]
        row += [f"{v:.3f}" for v in ref]
        row += [f"{v:.3f}" for v in centroids[cluster_idx]]
        row.append(f"{distance:.2f}")
        print("\t".join(row))
    for j in match.unmatched_references:
        label, ref = labeled[j]
        print(f"# unmatched reference (class {label}): " + ", ".join(f"{v:.3f}" for v in ref))
    for i in match.unmatched_clusters:
        print(f"# unmatched cluster C{i + 1}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamclust",
        description="Incremental stream clustering with drift detection.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic benchmark stream")
    p.add_argument("spec", help=f"named stream ({', '.join(sorted(NAMED_SPECS))}) or spec JSON file")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", help="output directory (default: <spec>_seed<seed>)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("chunk", help="split a labeled dataset file into a stream")
    p.add_argument("dataset", help="delimiter-separated file, label in the last column")
    p.add_argument("--chunks", type=int, default=10)
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=True,
                   help="min-max normalize attributes over the whole file first")
    p.add_argument("--artificial-classes", action="store_true",
                   help="add one binned artificial class column per attribute")
    p.add_argument("--out", help="output directory (default: <dataset>_stream)")
    p.set_defaults(func=cmd_chunk)

    p = sub.add_parser("run", help="run the engine over a stream and write metrics")
    p.add_argument("manifest")
    p.add_argument("--k", type=int, help="fixed cluster count (default: per-chunk unique label count)")
    p.add_argument("--o-thresh", type=float, default=DEFAULT_O_THRESH)
    p.add_argument("--d-thresh", type=float,
                   help="default 0.6, or 0.4 when the manifest origin is real-world")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--repeat", type=int, default=1,
                   help="average over this many runs with seeds seed, seed+1, ...")
    p.add_argument("--out", default="run_out", help="output directory")
    p.add_argument("--snapshot", help="write the final engine state to this file")
    p.add_argument("--stop-after", type=int,
                   help="process only the first N chunks (pair with --snapshot to suspend)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("resume", help="continue a run from a snapshot")
    p.add_argument("manifest")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--out", default="resume_out")
    p.add_argument("--snapshot-out", help="write the state at stream end to this file")
    p.set_defaults(func=cmd_resume)

    p = sub.add_parser("eval", help="score a run's final centroids against per-class means")
    p.add_argument("manifest")
    p.add_argument("report", help="metrics.jsonl produced by run/resume")
    p.add_argument("--run", type=int, default=0, help="which repeat to score")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
