"""Retrieval error taxonomy for failed instances."""

from collections import Counter
from collections.abc import Iterable

from src.core.eval_port import ErrorBreakdown, ErrorCategory, EvalInstance
from src.core.retrieval_port import RankedToolList, RetrievalConfig


def classify_errors(instance: EvalInstance, trace: RankedToolList, cfg: RetrievalConfig) -> ErrorCategory:
    """
    success: every golden tool is in the final list.
    Otherwise, keyed on the instance's seed tool:
      seed_not_in_top_k            the first pass missed it;
      top_1_but_truncated          it led the (reranked) seeds, yet a golden tool was cut;
      in_top_k_not_top_1_truncated it was a lower seed and a golden tool was cut.
    """
    if instance.golden_tools <= set(trace.tool_ids):
        return "success"
    top_k = {hit.tool_id for hit in trace.first_pass[: cfg.top_k]}
    if instance.seed_tool not in top_k:
        return "seed_not_in_top_k"
    if trace.seeds and trace.seeds[0] == instance.seed_tool:
        return "top_1_but_truncated"
    return "in_top_k_not_top_1_truncated"


def summarize_errors(label: str, categories: Iterable[ErrorCategory]) -> ErrorBreakdown:
    return ErrorBreakdown(label=label, counts=Counter(categories))
