"""
Retrieval Benchmark Runner

Compares baselines against graph expansion on synthetic tool graphs and
reports ranking quality plus per-query latency.

Usage:
    # Default sweep: 200 tools, average dependencies 1, 2, 4, 8
    uv run python benchmarks/run.py

    # Custom sweep with confusable queries and the oracle reranker
    uv run python benchmarks/run.py --avg-deps 2 6 --confusion 0.5 --oracle

    # Larger graphs, parallel evaluation
    uv run python benchmarks/run.py --tools 1000 --instances 500 --jobs 4

    # Save results to JSON
    uv run python benchmarks/run.py --save
"""

import argparse
import json
import sys
import time
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

from src.adapters.hash_embedder import HashEmbedder
from src.adapters.synthetic import generate_synthetic
from src.core.eval_port import SyntheticGenerationError
from src.core.retrieval_port import RetrievalConfig
from src.core.tool_graph import graph_stats
from src.services.benchmark import run_benchmark
from src.services.retrieval import build_corpus, retrieve

RESULTS_DIR = Path(__file__).parent / "results"

BASE_LINEUP: list[tuple[str, RetrievalConfig]] = [
    ("lexical", RetrievalConfig(mode="lexical")),
    ("vector", RetrievalConfig(mode="vector")),
    ("hybrid", RetrievalConfig(mode="hybrid")),
    ("graph_fusion", RetrievalConfig()),
]


def run_point(args: argparse.Namespace, avg_deps: float) -> dict[str, Any]:
    """Generate one synthetic benchmark and evaluate the line-up on it."""
    bench = generate_synthetic(
        seed=args.seed,
        tool_count=args.tools,
        avg_deps=avg_deps,
        instance_count=args.instances,
        confusion=args.confusion,
    )
    start_time = time.time()
    corpus = build_corpus(bench.graph, HashEmbedder())
    index_elapsed = time.time() - start_time

    configs = list(BASE_LINEUP)
    if args.oracle:
        configs.append(("graph_fusion+oracle", RetrievalConfig(reranker="oracle")))

    start_time = time.time()
    report = run_benchmark(corpus, bench.instances, configs, jobs=args.jobs).report
    eval_elapsed = time.time() - start_time

    # Single-threaded latency of the full graph pipeline
    cfg = RetrievalConfig()
    start_time = time.time()
    for instance in bench.instances:
        retrieve(instance.query, cfg, corpus)
    per_query_ms = (time.time() - start_time) * 1000 / max(1, len(bench.instances))

    stats = graph_stats(bench.graph)
    return {
        "avg_deps_target": avg_deps,
        "avg_deps_actual": round(stats.avg_dependencies, 3),
        "tools": stats.total_tools,
        "core_tools": stats.core_count,
        "instances": report.instance_count,
        "index_elapsed_s": round(index_elapsed, 3),
        "eval_elapsed_s": round(eval_elapsed, 3),
        "graph_fusion_ms_per_query": round(per_query_ms, 3),
        "mAP@10": {label: round(report.value(label, "mAP", 10), 4) for label in report.labels},
        "recall@30": {label: round(report.value(label, "recall", 30), 4) for label in report.labels},
        "failures": dict(report.failures),
    }


def print_result(result: dict[str, Any]) -> None:
    print(
        f"  Tools: {result['tools']} ({result['core_tools']} core)  |  "
        f"avg deps: {result['avg_deps_actual']:.2f}  |  instances: {result['instances']}"
    )
    print(
        f"  Index: {result['index_elapsed_s']:.2f}s  |  Eval: {result['eval_elapsed_s']:.2f}s  |  "
        f"graph_fusion: {result['graph_fusion_ms_per_query']:.2f}ms/query"
    )


def print_summary_table(results: list[dict[str, Any]]) -> None:
    """mAP@10 per retriever, one row per average-dependency setting."""
    labels = list(results[0]["mAP@10"])
    width = 12 + 22 * len(labels)
    print("\n" + "=" * width)
    print(f"{'avg deps':<12}" + "".join(f"{label:>22}" for label in labels))
    print("-" * width)
    for r in results:
        cells = "".join(f"{r['mAP@10'][label]:>22.4f}" for label in labels)
        print(f"{r['avg_deps_actual']:<12.2f}{cells}")
    print("=" * width)
    print("Cells: mAP@10")


def save_results(results: list[dict[str, Any]], args: argparse.Namespace) -> Path:
    """Save benchmark results to JSON file."""
    RESULTS_DIR.mkdir(parents=True, exist_ok=True)

    timestamp = datetime.now(tz=UTC).strftime("%Y%m%d_%H%M%S")
    output_path = RESULTS_DIR / f"synthetic_{timestamp}.json"

    payload = {
        "timestamp": datetime.now(tz=UTC).isoformat(),
        "settings": {
            "seed": args.seed,
            "tools": args.tools,
            "instances": args.instances,
            "confusion": args.confusion,
            "jobs": args.jobs,
        },
        "results": results,
    }

    output_path.write_text(json.dumps(payload, indent=2, ensure_ascii=False))
    return output_path


def main() -> None:
    parser = argparse.ArgumentParser(description="Retrieval Benchmark Runner")
    parser.add_argument("--avg-deps", type=float, nargs="+", default=[1.0, 2.0, 4.0, 8.0])
    parser.add_argument("--tools", type=int, default=200, help="Tools per synthetic graph")
    parser.add_argument("--instances", type=int, default=300, help="Queries per synthetic graph")
    parser.add_argument("--confusion", type=float, default=0.0, help="Share of confusable queries")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1, help="Evaluation threads")
    parser.add_argument("--oracle", action="store_true", help="Also run graph_fusion with the oracle reranker")
    parser.add_argument("--save", action="store_true", help="Save results to benchmarks/results/")
    args = parser.parse_args()

    results: list[dict[str, Any]] = []
    for avg_deps in args.avg_deps:
        print(f"\n── avg deps {avg_deps} ──")
        try:
            result = run_point(args, avg_deps)
        except SyntheticGenerationError as exc:
            print(f"  ERROR: {exc}")
            continue
        print_result(result)
        results.append(result)

    if not results:
        print("No benchmark point could be generated.")
        sys.exit(1)

    print_summary_table(results)

    if args.save:
        path = save_results(results, args)
        print(f"\nResults saved to: {path}")


if __name__ == "__main__":
    main()
