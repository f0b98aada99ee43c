"""
Subcommands of the `tool-graph-retrieval` CLI.

Each handler takes the parsed namespace and an output stream and returns an
exit code: 0 success, 1 data or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
from collections.abc import Callable, Sequence
from dataclasses import replace
from pathlib import Path
from typing import TextIO

from src.adapters.graph_document import import_toollinkos, load_graph
from src.adapters.instances import load_instances
from src.adapters.report import (
    format_table,
    render_error_table,
    render_error_tsv,
    render_table,
    render_tsv,
    report_to_json,
)
from src.adapters.synthetic import generate_synthetic
from src.config import (
    DEFAULT_ALPHA,
    DEFAULT_D_LIMIT,
    DEFAULT_FINAL_TOP_K,
    DEFAULT_TOP_K,
    EVAL_JOBS,
    RERANKER_API_URL,
    get_provider_config,
)
from src.core.accuracy_model import AccuracyModel, AccuracyModelError, expected_accuracy
from src.core.embedding_port import EmbeddingError
from src.core.eval_port import EvaluationError
from src.core.factory import create_provider
from src.core.hook_registry import list_all_query_transforms, list_all_rerankers, lookup_reranker
from src.core.index_port import IndexBuildError
from src.core.lexical_index import load_lexical_index, save_lexical_index
from src.core.provider_registry import list_all_providers
from src.core.retrieval_port import (
    FIRST_PASS_MODES,
    FUSION_METHODS,
    RETRIEVAL_MODES,
    RetrievalConfig,
    RetrievalConfigError,
    RetrievalError,
)
from src.core.tool_graph import (
    GraphValidationError,
    ToolGraphError,
    ToolKnowledgeGraph,
    graph_stats,
    validate_graph,
)
from src.services.accuracy_simulation import simulate_accuracy
from src.services.benchmark import STANDARD_LINEUP, BenchmarkResult, run_benchmark
from src.services.retrieval import RetrievalCorpus, build_corpus, retrieve

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_USAGE_ERROR = 2

Handler = Callable[[argparse.Namespace, TextIO], int]


# === Parser ===


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tool-graph-retrieval",
        description="Tool retrieval over a tool dependency graph",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    validate = subparsers.add_parser("validate", help="Check a tool graph against the schema")
    _add_graph_arguments(validate)

    stats = subparsers.add_parser("stats", help="Print tool counts and average dependencies")
    _add_graph_arguments(stats)

    index = subparsers.add_parser("index", help="Embed every tool and write the lexical index snapshot")
    _add_graph_arguments(index)
    _add_provider_arguments(index)
    index.add_argument("--out", type=Path, required=True, help="Lexical index snapshot to write")

    retrieve_cmd = subparsers.add_parser("retrieve", help="Retrieve tools for one query")
    _add_graph_arguments(retrieve_cmd)
    _add_provider_arguments(retrieve_cmd)
    _add_retrieval_arguments(retrieve_cmd)
    retrieve_cmd.add_argument("--query", required=True, help="User query")
    retrieve_cmd.add_argument("--lexical-index", type=Path, help="Snapshot written by `index`")

    for name, help_text in (
        ("eval", "Score retrievers with mAP, nDCG and recall at 10/20/30"),
        ("errors", "Break down retrieval failures by cause"),
    ):
        command = subparsers.add_parser(name, help=help_text)
        _add_graph_arguments(command)
        _add_provider_arguments(command)
        _add_retrieval_arguments(command)
        command.add_argument("--instances", type=Path, required=True, help="Benchmark instances (JSONL)")
        command.add_argument("--jobs", type=int, default=EVAL_JOBS, help="Worker threads (default: EVAL_JOBS)")
        command.add_argument("--format", choices=("table", "tsv"), default="table", help="Output format")
        command.add_argument("--out", type=Path, help="Also save the full report as JSON")

    synth = subparsers.add_parser("synth", help="Generate a deterministic synthetic benchmark")
    synth.add_argument("--out", type=Path, required=True, help="Output directory")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--tools", type=int, default=200, help="Number of tools")
    synth.add_argument("--avg-deps", type=float, default=4.0, help="Average dependencies per tool")
    synth.add_argument("--instance-count", type=int, default=300, help="Number of benchmark instances")
    synth.add_argument("--confusion", type=float, default=0.0, help="Share of queries mixed with another tool")

    simulate = subparsers.add_parser("simulate", help="Compare expected and simulated pipeline accuracy")
    simulate.add_argument("--top-k", type=int, default=DEFAULT_TOP_K)
    simulate.add_argument("--d-limit", type=int, default=DEFAULT_D_LIMIT)
    simulate.add_argument("--slots", type=int, required=True, help="Final list slots left for dependencies")
    simulate.add_argument("--discovered", type=int, required=True, help="Tools discovered by the seed")
    simulate.add_argument("--vector-accuracy", type=float, required=True)
    simulate.add_argument("--dependency-gain", type=float, required=True)
    simulate.add_argument("--trials", type=int, default=10_000)
    simulate.add_argument("--seed", type=int, default=0)
    return parser


def _add_graph_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", type=Path, required=True, help="Tool graph document (JSON)")
    parser.add_argument("--toollinkos", action="store_true", help="Read the graph in ToolLinkOS layout")


def _add_provider_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--provider",
        choices=[spec.alias for spec in list_all_providers()],
        help="Embedding provider (default: EMBEDDING_PROVIDER)",
    )
    parser.add_argument("--cache", help="Embedding cache file (default: EMBEDDING_CACHE_PATH)")
    parser.add_argument(
        "--cache-source",
        help="Provider whose vectors the cache holds (default: EMBEDDING_CACHE_SOURCE)",
    )


def _add_retrieval_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=RETRIEVAL_MODES, help="Retrieval mode")
    parser.add_argument("--top-k", type=int, default=DEFAULT_TOP_K, help="Seeds taken from the first pass")
    parser.add_argument("--rerank-top-k", type=int, help="Candidates handed to the reranker")
    parser.add_argument(
        "--final-top-K",
        dest="final_top_k",
        type=int,
        default=DEFAULT_FINAL_TOP_K,
        help="Length of the final tool list",
    )
    parser.add_argument("--d-limit", type=int, default=DEFAULT_D_LIMIT, help="Dependencies per seed")
    parser.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="Vector weight in hybrid search")
    parser.add_argument("--first-pass", choices=FIRST_PASS_MODES, default="hybrid")
    parser.add_argument("--fusion", choices=FUSION_METHODS, default="score")
    parser.add_argument("--reranker", choices=[spec.alias for spec in list_all_rerankers()])
    parser.add_argument("--query-transform", choices=[spec.alias for spec in list_all_query_transforms()])


# === Shared loading ===


def load_graph_file(path: Path, toollinkos: bool = False) -> ToolKnowledgeGraph:
    with path.open("rb") as handle:
        return import_toollinkos(handle) if toollinkos else load_graph(handle)


def _corpus(args: argparse.Namespace, graph: ToolKnowledgeGraph) -> RetrievalCorpus:
    config = get_provider_config(args.provider, args.cache, args.cache_source)
    provider = create_provider(config)
    lexical_path: Path | None = getattr(args, "lexical_index", None)
    lexical = load_lexical_index(lexical_path) if lexical_path is not None else None
    return build_corpus(graph, provider, lexical=lexical)


def retrieval_config(args: argparse.Namespace) -> RetrievalConfig:
    return RetrievalConfig(
        mode=args.mode or "graph_fusion",
        top_k=args.top_k,
        rerank_top_k=args.rerank_top_k,
        final_top_k=args.final_top_k,
        d_limit=args.d_limit,
        alpha=args.alpha,
        query_transform=args.query_transform,
        reranker=args.reranker,
        first_pass=args.first_pass,
        fusion=args.fusion,
    )


def lineup(args: argparse.Namespace) -> list[tuple[str, RetrievalConfig]]:
    """The standard line-up with CLI settings applied, or one retriever if --mode is given."""
    if args.mode is not None:
        cfg = retrieval_config(args)
        label = cfg.mode if cfg.reranker is None else f"{cfg.mode}+rr"
        return [(label, cfg)]

    configs: list[tuple[str, RetrievalConfig]] = []
    for label, base in STANDARD_LINEUP:
        reranker = base.reranker
        if reranker is not None and args.reranker is not None:
            reranker = args.reranker
        configs.append(
            (
                label,
                replace(
                    base,
                    top_k=args.top_k,
                    rerank_top_k=args.rerank_top_k,
                    final_top_k=args.final_top_k,
                    d_limit=args.d_limit,
                    alpha=args.alpha,
                    query_transform=args.query_transform,
                    reranker=reranker,
                    first_pass=args.first_pass,
                    fusion=args.fusion,
                ),
            )
        )
    return configs


def _benchmark(args: argparse.Namespace) -> BenchmarkResult:
    configs = lineup(args)
    if args.jobs < 1:
        raise RetrievalConfigError(f"--jobs must be >= 1, got {args.jobs}")
    remote = sorted(
        {cfg.reranker for _, cfg in configs if cfg.reranker and lookup_reranker(cfg.reranker).remote}
    )
    if not RERANKER_API_URL and remote:
        logger.warning(
            f"⚠️  RERANKER_API_URL is not set; {', '.join(remote)} reranking will keep the first-pass order"
        )

    graph = load_graph_file(args.graph, args.toollinkos)
    with args.instances.open("rb") as handle:
        instances = load_instances(handle, known_tool_ids=set(graph.nodes))
    corpus = _corpus(args, graph)
    result = run_benchmark(corpus, instances, configs, jobs=args.jobs)
    if args.out is not None:
        payload = report_to_json(result.report, result.error_breakdowns)
        args.out.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        logger.info(f"💾 Report saved to: {args.out}")
    return result


# === Handlers ===


def cmd_validate(args: argparse.Namespace, out: TextIO) -> int:
    try:
        graph = load_graph_file(args.graph, args.toollinkos)
    except GraphValidationError as exc:
        out.write(f"1 violations\n  {exc}\n")
        return EXIT_DATA_ERROR

    report = validate_graph(graph)
    out.write(f"{len(report)} violations\n")
    for violation in report.violations:
        where = f" [{violation.tool_id}]" if violation.tool_id else ""
        out.write(f"  {violation.code}{where}: {violation.message}\n")
    return EXIT_OK if report.is_valid else EXIT_DATA_ERROR


def cmd_stats(args: argparse.Namespace, out: TextIO) -> int:
    stats = graph_stats(load_graph_file(args.graph, args.toollinkos))
    out.write(f"tools: {stats.total_tools}\n")
    out.write(f"core: {stats.core_count}\n")
    out.write(f"regular: {stats.regular_count}\n")
    out.write(f"avg_dependencies: {stats.avg_dependencies:.2f}\n")
    return EXIT_OK


def cmd_index(args: argparse.Namespace, out: TextIO) -> int:
    graph = load_graph_file(args.graph, args.toollinkos)
    corpus = _corpus(args, graph)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_lexical_index(corpus.lexical, args.out)
    out.write(f"indexed {len(corpus)} tools with {corpus.provider.name}/{corpus.provider.model}\n")
    out.write(f"lexical index: {args.out}\n")
    return EXIT_OK


def cmd_retrieve(args: argparse.Namespace, out: TextIO) -> int:
    cfg = retrieval_config(args)
    corpus = _corpus(args, load_graph_file(args.graph, args.toollinkos))
    result = retrieve(args.query, cfg, corpus)
    rows = [
        [str(rank), entry.tool_id, entry.provenance, entry.seed_id]
        for rank, entry in enumerate(result.entries, start=1)
    ]
    out.write(format_table(["rank", "tool", "provenance", "seed"], rows))
    if result.truncated:
        out.write(f"truncated at {cfg.final_top_k} tools\n")
    for warning in result.warnings:
        out.write(f"warning: {warning}\n")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, out: TextIO) -> int:
    report = _benchmark(args).report
    out.write(render_tsv(report) if args.format == "tsv" else render_table(report))
    return EXIT_OK


def cmd_errors(args: argparse.Namespace, out: TextIO) -> int:
    breakdowns = _benchmark(args).error_breakdowns
    out.write(render_error_tsv(breakdowns) if args.format == "tsv" else render_error_table(breakdowns))
    return EXIT_OK


def cmd_synth(args: argparse.Namespace, out: TextIO) -> int:
    benchmark = generate_synthetic(
        seed=args.seed,
        tool_count=args.tools,
        avg_deps=args.avg_deps,
        instance_count=args.instance_count,
        confusion=args.confusion,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    files = {
        "graph.json": benchmark.graph_document(),
        "instances.jsonl": benchmark.instances_document(),
        "embeddings.tsv": benchmark.fixture,
    }
    for name, content in files.items():
        (args.out / name).write_text(content, encoding="utf-8")
        out.write(f"wrote {args.out / name}\n")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, out: TextIO) -> int:
    model = AccuracyModel(
        k=args.top_k,
        d=args.d_limit,
        K=args.slots,
        N=args.discovered,
        vector_accuracy=args.vector_accuracy,
        dependency_gain=args.dependency_gain,
    )
    estimate = expected_accuracy(model)
    result = simulate_accuracy(model, trials=args.trials, seed=args.seed)
    out.write(f"expected: {estimate.value:.4f}{' (clamped)' if estimate.clamped else ''}\n")
    out.write(f"simulated: {result.accuracy:.4f} over {result.trials} trials\n")
    out.write(f"difference: {result.error:+.4f}\n")
    return EXIT_OK


COMMANDS: dict[str, Handler] = {
    "validate": cmd_validate,
    "stats": cmd_stats,
    "index": cmd_index,
    "retrieve": cmd_retrieve,
    "eval": cmd_eval,
    "errors": cmd_errors,
    "synth": cmd_synth,
    "simulate": cmd_simulate,
}


def dispatch(argv: Sequence[str] | None, out: TextIO) -> int:
    """Parse `argv` and run the chosen command, mapping failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE_ERROR

    handler = COMMANDS[args.command]
    try:
        return handler(args, out)
    except (RetrievalConfigError, AccuracyModelError) as exc:
        logger.error(f"Invalid settings: {exc}")
        return EXIT_USAGE_ERROR
    except (
        ToolGraphError,
        EmbeddingError,
        IndexBuildError,
        EvaluationError,
        RetrievalError,
        OSError,
        KeyError,
        ValueError,
    ) as exc:
        logger.error(f"{args.command} failed: {type(exc).__name__}: {exc}")
        return EXIT_DATA_ERROR
