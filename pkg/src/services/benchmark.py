"""
Benchmark runner: every configured retriever over every instance, aggregated
into mean mAP/nDCG/recall at each cutoff plus an error breakdown.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import partial

from src.core.error_taxonomy import classify_errors, summarize_errors
from src.core.eval_port import (
    CUTOFFS,
    METRICS,
    ErrorBreakdown,
    ErrorCategory,
    EvalInstance,
    MetricKey,
    MetricName,
    MetricsReport,
)
from src.core.hook_registry import lookup_query_transform, lookup_reranker
from src.core.metrics import average_precision, ndcg_at, recall_at
from src.core.retrieval_port import Reranker, RetrievalConfig
from src.services.retrieval import RetrievalCorpus, retrieve

logger = logging.getLogger(__name__)

EVAL_FINAL_TOP_K = max(CUTOFFS)

_METRIC_FUNCTIONS = {
    "mAP": average_precision,
    "nDCG": ndcg_at,
    "recall": recall_at,
}

# Retriever line-up compared by `eval` and `errors`
STANDARD_LINEUP: tuple[tuple[str, RetrievalConfig], ...] = (
    ("lexical", RetrievalConfig(mode="lexical")),
    ("vector", RetrievalConfig(mode="vector")),
    ("hybrid", RetrievalConfig(mode="hybrid")),
    ("graph_fusion", RetrievalConfig(mode="graph_fusion")),
    ("graph_fusion+rr", RetrievalConfig(mode="graph_fusion", reranker="llm")),
)


@dataclass(frozen=True)
class InstanceOutcome:
    metrics: Mapping[tuple[MetricName, int], float]
    category: ErrorCategory


@dataclass(frozen=True)
class BenchmarkResult:
    report: MetricsReport
    error_breakdowns: tuple[ErrorBreakdown, ...]


def instance_metrics(ranked: Sequence[str], golden: frozenset[str]) -> dict[tuple[MetricName, int], float]:
    return {
        (metric, cutoff): _METRIC_FUNCTIONS[metric](ranked, golden, cutoff)
        for metric in METRICS
        for cutoff in CUTOFFS
    }


def evaluate_instance(
    corpus: RetrievalCorpus,
    instance: EvalInstance,
    cfg: RetrievalConfig,
    rerankers: Mapping[str, Reranker] | None = None,
) -> InstanceOutcome:
    trace = retrieve(instance.query, cfg, corpus, golden=instance.golden_tools, rerankers=rerankers)
    return InstanceOutcome(
        metrics=instance_metrics(trace.tool_ids, instance.golden_tools),
        category=classify_errors(instance, trace, cfg),
    )


def run_benchmark(
    corpus: RetrievalCorpus,
    instances: Sequence[EvalInstance],
    configs: Sequence[tuple[str, RetrievalConfig]],
    jobs: int = 1,
    rerankers: Mapping[str, Reranker] | None = None,
) -> BenchmarkResult:
    """
    Evaluate each (label, config) with final_top_k forced to the largest cutoff.

    Instances run on up to `jobs` threads; results are merged in instance
    order, so reports are identical for any `jobs`. An instance that raises
    is counted as a failure for that label and left out of its means.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    labels = [label for label, _ in configs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"retriever labels must be unique, got {labels}")
    for _, cfg in configs:
        _check_hooks(cfg)

    values: dict[MetricKey, float] = {}
    failures: dict[str, int] = {}
    breakdowns: list[ErrorBreakdown] = []
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for label, cfg in configs:
            eval_cfg = replace(cfg, final_top_k=EVAL_FINAL_TOP_K)
            logger.info(f"📋 Evaluating '{label}' on {len(instances)} instances")
            evaluate = partial(_safe_evaluate, corpus, cfg=eval_cfg, rerankers=rerankers)
            outcomes = list(pool.map(evaluate, instances))
            succeeded = [outcome for outcome in outcomes if outcome is not None]
            failures[label] = len(outcomes) - len(succeeded)
            if failures[label]:
                logger.warning(f"⚠️  '{label}': {failures[label]} of {len(instances)} instances failed")
            values.update(_means(label, succeeded))
            breakdowns.append(summarize_errors(label, (outcome.category for outcome in succeeded)))

    report = MetricsReport(
        labels=tuple(labels),
        values=values,
        instance_count=len(instances),
        failures=failures,
    )
    logger.info(f"✅ Benchmark finished: {len(labels)} retrievers x {len(instances)} instances")
    return BenchmarkResult(report=report, error_breakdowns=tuple(breakdowns))


def _check_hooks(cfg: RetrievalConfig) -> None:
    if cfg.reranker is not None:
        lookup_reranker(cfg.reranker)
    if cfg.query_transform is not None:
        lookup_query_transform(cfg.query_transform)


def _safe_evaluate(
    corpus: RetrievalCorpus,
    instance: EvalInstance,
    cfg: RetrievalConfig,
    rerankers: Mapping[str, Reranker] | None,
) -> InstanceOutcome | None:
    try:
        return evaluate_instance(corpus, instance, cfg, rerankers)
    except Exception as exc:
        logger.warning(f"⚠️  Instance {instance.id} failed: {type(exc).__name__}: {exc}")
        return None


def _means(label: str, outcomes: Sequence[InstanceOutcome]) -> dict[MetricKey, float]:
    means: dict[MetricKey, float] = {}
    for metric in METRICS:
        for cutoff in CUTOFFS:
            samples = [outcome.metrics[(metric, cutoff)] for outcome in outcomes]
            # exact sum: independent of sample order
            means[(label, metric, cutoff)] = math.fsum(samples) / len(samples) if samples else 0.0
    return means
