"""Domain types shared by the closed-form, oracle, and simulation code.

A single miner drains a transaction pool fed by Poisson arrivals (rate
``lambda``). Each mining round lasts an exponential time (rate ``mu``),
independent of how many transactions the block carries. The policy knob is
an integer threshold ``d``: a miner that finds fewer than ``d`` queued
transactions when its round completes stays idle until the pool grows to
exactly ``d``, then picks up everything and starts the next round. ``d = 1``
is the classic no-wait behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ValidationError(ValueError):
    """Raised when model parameters or configuration values are rejected."""


def _require_positive_rate(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    if value <= 0.0:
        raise ValidationError(f"{name} must be > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Validated arrival/service rates, in events per unit time.

    Derived quantities are recomputed on access so the object can never
    carry an internally inconsistent cached value. Immutable, safe to share
    across threads.
    """

    arrival_rate: float
    service_rate: float

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "arrival_rate", _require_positive_rate("arrival_rate", self.arrival_rate)
        )
        object.__setattr__(
            self, "service_rate", _require_positive_rate("service_rate", self.service_rate)
        )

    @property
    def rho(self) -> float:
        """Geometric decay ratio lambda / (lambda + mu); always in (0, 1)."""
        return self.arrival_rate / (self.arrival_rate + self.service_rate)

    @property
    def mean_service(self) -> float:
        """Mean mining-round duration, 1 / mu."""
        return 1.0 / self.service_rate

    @property
    def load_ratio(self) -> float:
        """lambda / mu, the natural dimensionless size of the problem."""
        return self.arrival_rate / self.service_rate


def new_params(arrival_rate: float, service_rate: float) -> ModelParams:
    """Build validated ``ModelParams``; rejects non-positive or non-finite rates."""
    return ModelParams(arrival_rate, service_rate)


@dataclass(frozen=True)
class Policy:
    """Batch threshold: the miner waits for at least ``d`` queued transactions.

    ``d = 1`` never waits (a completed round immediately picks up whatever
    is queued, and an idle miner starts on the first arrival).
    """

    d: int

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or isinstance(self.d, bool):
            raise ValidationError(f"threshold d must be an integer, got {self.d!r}")
        if self.d < 1:
            raise ValidationError(f"threshold d must be >= 1, got {self.d}")
