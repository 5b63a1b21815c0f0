"""Result containers shared by every distance method."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .gf2 import BitVector

INF = math.inf


class Status(str, Enum):
    EXACT = "Exact"
    UPPER_ONLY = "UpperOnly"
    BOUNDS = "Bounds"
    TIMEOUT = "Timeout"

    def __str__(self) -> str:
        return self.value


class NoResultError(RuntimeError):
    """Raised when a search finishes without finding any logical operator."""


class Deadline:
    """Cooperative wall-clock budget checked between chunks of work."""

    def __init__(self, max_time: float | None = None):
        self.start = time.monotonic()
        self.max_time = max_time
        self._cancelled = False

    def elapsed(self) -> float:
        return time.monotonic() - self.start

    def cancel(self) -> None:
        self._cancelled = True

    def expired(self) -> bool:
        if self._cancelled:
            return True
        return self.max_time is not None and self.elapsed() >= self.max_time


@dataclass
class TrialStats:
    """Per-trial record of a randomised search.

    ``witness_counts`` maps each lowest-weight codeword (as packed bytes)
    to the number of times it was produced.
    """

    iter_count: int = 0
    min_weight: float = INF
    witness_counts: dict[bytes, int] = field(default_factory=dict)
    trial_weights: list[float] = field(default_factory=list)

    @property
    def mean_count(self) -> float:
        if not self.witness_counts:
            return 0.0
        return sum(self.witness_counts.values()) / len(self.witness_counts)

    @property
    def p_fail(self) -> float:
        """Estimated probability that a lower-weight codeword was missed."""
        return math.exp(-self.mean_count)

    def trials_at(self, weight: float) -> int:
        return sum(1 for w in self.trial_weights if w == weight)

    def record(self, weight: float, keys: list[bytes]) -> None:
        """Fold in one trial whose best weight is ``weight`` with witnesses ``keys``."""
        self.iter_count += 1
        self.trial_weights.append(weight)
        if weight < self.min_weight:
            self.min_weight = weight
            self.witness_counts = {}
        if weight == self.min_weight and weight < INF:
            for key in keys:
                self.witness_counts[key] = self.witness_counts.get(key, 0) + 1


@dataclass
class DistanceResult:
    status: Status
    d_lower: float
    d_upper: float
    witness: BitVector | None = None
    elapsed: float = 0.0
    method: str = ""
    stats: TrialStats | None = None
    trace: list[Any] | None = None

    def __post_init__(self) -> None:
        if self.d_lower > self.d_upper:
            raise ValueError(f"lower bound {self.d_lower} exceeds upper bound {self.d_upper}")
        if self.status is Status.EXACT and self.d_lower != self.d_upper:
            raise ValueError("exact result with unequal bounds")

    @property
    def distance(self) -> float:
        """Best known value: the exact distance or the upper bound."""
        return self.d_upper

    def summary(self) -> str:
        if self.status is Status.EXACT:
            return f"Exact d={_fmt(self.d_upper)}"
        if self.status is Status.UPPER_ONLY:
            extra = f", pFail={self.stats.p_fail:.3g}" if self.stats and self.stats.witness_counts else ""
            return f"UpperOnly d<={_fmt(self.d_upper)}{extra}"
        if self.status is Status.BOUNDS:
            return f"Bounds {_fmt(self.d_lower)}<=d<={_fmt(self.d_upper)}"
        return f"Timeout d>={_fmt(self.d_lower)}"


def _fmt(x: float) -> str:
    if x == INF:
        return "inf"
    return str(int(x))


def exact(d: int, witness: BitVector | None, elapsed: float, method: str, **kw) -> DistanceResult:
    return DistanceResult(Status.EXACT, d, d, witness, elapsed, method, **kw)
