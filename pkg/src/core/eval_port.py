"""Typed port contract for benchmark instances, metric reports and error breakdowns."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Literal

MetricName = Literal["mAP", "nDCG", "recall"]
ErrorCategory = Literal[
    "seed_not_in_top_k",
    "in_top_k_not_top_1_truncated",
    "top_1_but_truncated",
    "success",
]

METRICS: tuple[MetricName, ...] = ("mAP", "nDCG", "recall")
CUTOFFS: tuple[int, ...] = (10, 20, 30)
ERROR_CATEGORIES: tuple[ErrorCategory, ...] = (
    "seed_not_in_top_k",
    "in_top_k_not_top_1_truncated",
    "top_1_but_truncated",
    "success",
)


class EvaluationError(Exception):
    """Base error for the evaluation harness."""


class InstanceParseError(EvaluationError):
    def __init__(self, message: str, *, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class InstanceValidationError(EvaluationError):
    """Raised with every problem found, not just the first."""

    def __init__(self, problems: Sequence[str]) -> None:
        super().__init__("; ".join(problems))
        self.problems = tuple(problems)


class SyntheticGenerationError(EvaluationError):
    """Raised when generator parameters cannot produce the requested graph."""


@dataclass(frozen=True)
class EvalInstance:
    id: str
    query: str
    golden_tools: frozenset[str]
    # Primary tool the query asks for; error classification keys on it
    seed_tool: str

    def __post_init__(self) -> None:
        if not self.golden_tools:
            raise ValueError(f"instance {self.id} has an empty golden set")
        if self.seed_tool not in self.golden_tools:
            raise ValueError(f"instance {self.id}: seed tool {self.seed_tool} is not golden")


MetricKey = tuple[str, MetricName, int]


@dataclass(frozen=True)
class MetricsReport:
    """(retriever label, metric, cutoff) -> mean value over evaluated instances."""

    labels: tuple[str, ...]
    values: Mapping[MetricKey, float]
    instance_count: int
    # label -> instances that raised and were left out of the means
    failures: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, value in self.values.items():
            if not 0.0 <= value <= 1.0 + 1e-12:
                raise ValueError(f"metric {key} = {value} is outside [0, 1]")
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))
        object.__setattr__(self, "failures", MappingProxyType(dict(self.failures)))

    def value(self, label: str, metric: MetricName, cutoff: int) -> float:
        return self.values[(label, metric, cutoff)]

    @property
    def failed_instances(self) -> int:
        return sum(self.failures.values())


@dataclass(frozen=True)
class ErrorBreakdown:
    label: str
    counts: Mapping[ErrorCategory, int]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "counts", MappingProxyType({c: self.counts.get(c, 0) for c in ERROR_CATEGORIES})
        )

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def failures(self) -> int:
        return self.total - self.counts["success"]

    def rate(self, category: ErrorCategory) -> float:
        return self.counts[category] / self.total if self.total else 0.0

    @property
    def rates(self) -> dict[ErrorCategory, float]:
        return {category: self.rate(category) for category in ERROR_CATEGORIES}
