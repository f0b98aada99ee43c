"""Expected full-pipeline accuracy: vector hit-rate plus scaled dependency gain."""

import logging
from dataclasses import dataclass

logger = logging.getLogger(__name__)


class AccuracyModelError(ValueError):
    """Raised when the model is outside its domain (N = 0)."""


@dataclass(frozen=True)
class AccuracyModel:
    """
    k: first-pass size, d: dependency limit, K: final list size,
    N: tools discovered including dependencies.
    """

    k: int
    d: int
    K: int
    N: int
    vector_accuracy: float
    dependency_gain: float

    def __post_init__(self) -> None:
        for name in ("vector_accuracy", "dependency_gain"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        for name in ("k", "d", "K", "N"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def coverage(self) -> float:
        """min(1, K/N)."""
        if self.N == 0:
            raise AccuracyModelError("N must be >= 1; no tools were discovered")
        return min(1.0, self.K / self.N)


@dataclass(frozen=True)
class AccuracyEstimate:
    value: float
    # Unclamped sum; may exceed 1
    raw: float
    clamped: bool


def expected_accuracy(m: AccuracyModel) -> AccuracyEstimate:
    raw = m.vector_accuracy + m.dependency_gain * m.coverage
    value = min(1.0, max(0.0, raw))
    clamped = value != raw
    if clamped:
        logger.warning(f"⚠️  Expected accuracy {raw:.4f} is outside [0, 1]; clamped to {value:.4f}")
    return AccuracyEstimate(value=value, raw=raw, clamped=clamped)
