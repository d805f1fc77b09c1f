"""Closed-form stationary analysis of the threshold-batch mining queue.

The pool-plus-miner system is a continuous-time Markov chain over two state
families: busy states ``N_i`` (round in progress, ``i`` transactions
queued, ``i >= 0``) and idle states ``M_i`` (round finished, miner waiting
for the pool to reach the threshold, ``0 <= i <= d - 1``). With
``rho = lam / (lam + mu)`` the stationary probabilities are geometric over
the busy chain and affine-minus-geometric over the idle chain:

    pi_busy(i) = rho**i * p0
    pi_idle(i) = ((lam + mu) / lam - rho**i) * p0
    p0         = 1 / (d * (lam + mu) / lam + (lam + mu) / mu * rho**d)

Everything else (queue-length pmf, mean queue length, mean waiting time)
follows from these in O(1). "Waiting time" is the interval from a
transaction's arrival to the start of the round that includes it; time
spent inside the round is excluded.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ModelParams, Policy, ValidationError

__all__ = [
    "StationaryDistribution",
    "AnalyticSummary",
    "pi_n0",
    "pi_busy",
    "pi_idle",
    "queue_length_pmf",
    "mean_queue_length",
    "mean_wait",
    "mean_wait_d1",
    "mean_batch_size",
    "asymptotic_wait",
]


def pi_n0(params: ModelParams, d: int) -> float:
    """Stationary probability of the busy-and-empty state ``N_0``.

    ``rho**d`` underflows to 0 for huge ``d``; the formula then degrades
    gracefully to ``lam / (d * (lam + mu))``, which is the correct limit.
    """
    Policy(d)
    lam, mu = params.arrival_rate, params.service_rate
    rho = params.rho
    return 1.0 / (d * (lam + mu) / lam + (lam + mu) / mu * rho**d)


def pi_busy(params: ModelParams, d: int, i: int) -> float:
    """Stationary probability of busy state ``N_i`` (``i`` queued, mining)."""
    return StationaryDistribution.for_policy(params, d).busy(i)


def pi_idle(params: ModelParams, d: int, i: int) -> float:
    """Stationary probability of idle state ``M_i`` (``i`` queued, miner waiting)."""
    return StationaryDistribution.for_policy(params, d).idle(i)


def queue_length_pmf(params: ModelParams, d: int, l: int) -> float:
    """Probability of exactly ``l`` transactions in the pool."""
    return StationaryDistribution.for_policy(params, d).pmf(l)


@dataclass(frozen=True)
class StationaryDistribution:
    """Closed-form stationary distribution for given rates and threshold.

    Holds only ``p0`` (the ``N_0`` probability); every other probability is
    an O(1) accessor. The induced distribution sums to 1 exactly, by
    construction of ``p0``.
    """

    params: ModelParams
    d: int
    p0: float

    @classmethod
    def for_policy(cls, params: ModelParams, d: int) -> "StationaryDistribution":
        return cls(params, d, pi_n0(params, d))

    def busy(self, i: int) -> float:
        """P[N_i] = rho**i * p0 for i >= 0."""
        if i < 0:
            raise ValidationError(f"busy-state index must be >= 0, got {i}")
        return self.params.rho**i * self.p0

    def idle(self, i: int) -> float:
        """P[M_i] = ((lam+mu)/lam - rho**i) * p0; only i in [0, d-1] exist."""
        if i < 0 or i > self.d - 1:
            raise ValidationError(
                f"idle-state index must be in [0, {self.d - 1}], got {i}"
            )
        params = self.params
        ratio = (params.arrival_rate + params.service_rate) / params.arrival_rate
        return (ratio - params.rho**i) * self.p0

    def pmf(self, l: int) -> float:
        """P[queue length == l]: flat at ((lam+mu)/lam)*p0 below the
        threshold, geometric rho**l * p0 at and above it."""
        if l < 0:
            raise ValidationError(f"queue length must be >= 0, got {l}")
        params = self.params
        if l <= self.d - 1:
            return (params.arrival_rate + params.service_rate) / params.arrival_rate * self.p0
        return params.rho**l * self.p0

    def busy_mass(self) -> float:
        """Total busy probability: sum over i of P[N_i] = p0 * (lam+mu)/mu."""
        params = self.params
        return self.p0 * (params.arrival_rate + params.service_rate) / params.service_rate

    def idle_mass(self) -> float:
        """Total idle probability: sum over i < d of P[M_i], in closed form."""
        params = self.params
        lam, mu = params.arrival_rate, params.service_rate
        rho = params.rho
        geometric_sum = (1.0 - rho**self.d) / (1.0 - rho)
        return self.p0 * (self.d * (lam + mu) / lam - geometric_sum)

    def total_mass(self) -> float:
        return self.busy_mass() + self.idle_mass()


@dataclass(frozen=True)
class AnalyticSummary:
    """Mean queue length and mean waiting time, tied by Little's law.

    ``w_bar = l_bar / lam`` is a definition here, not an estimate, and
    ``w_bar_normalized = mu * w_bar`` is the dimensionless form used for
    reporting; both are carried so downstream code never renormalizes
    inconsistently.
    """

    l_bar: float
    w_bar: float
    w_bar_normalized: float


def mean_queue_length(params: ModelParams, d: int) -> float:
    """Stationary mean pool length.

    l_bar = p0 * ( (lam+mu)/lam * d*(d-1)/2
                   + (lam/mu) * (lam/mu + d) * rho**(d-1) )

    The first term is the flat part of the pmf below the threshold, the
    second the geometric tail, both summed in closed form.
    """
    Policy(d)
    lam, mu = params.arrival_rate, params.service_rate
    rho = params.rho
    p0 = pi_n0(params, d)
    flat = (lam + mu) / lam * (d * (d - 1) / 2.0)
    tail = (lam / mu) * (lam / mu + d) * rho ** (d - 1)
    return p0 * (flat + tail)


def mean_wait(params: ModelParams, d: int) -> AnalyticSummary:
    """Mean waiting time per transaction via Little's law, plus mu-normalized form."""
    l_bar = mean_queue_length(params, d)
    w_bar = l_bar / params.arrival_rate
    return AnalyticSummary(
        l_bar=l_bar,
        w_bar=w_bar,
        w_bar_normalized=params.service_rate * w_bar,
    )


def mean_wait_d1(params: ModelParams) -> float:
    """Mean waiting time of the no-wait policy (d = 1), fully simplified:

    w_bar(1) = lam * (lam + mu) / (mu * (lam*mu + mu**2 + lam**2))
    """
    lam, mu = params.arrival_rate, params.service_rate
    return lam * (lam + mu) / (mu * (lam * mu + mu**2 + lam**2))


def mean_batch_size(params: ModelParams, d: int) -> float:
    """Expected transactions per pickup.

    Pickups happen at rate mu * P[busy, >= d queued] (rounds that finish
    above the threshold and restart at once) plus lam * P[M_{d-1}]
    (arrivals that complete a threshold batch). Every transaction is
    picked up exactly once, so the mean batch is lam over that rate.
    """
    dist = StationaryDistribution.for_policy(params, d)
    lam, mu = params.arrival_rate, params.service_rate
    rho = params.rho
    busy_tail = dist.p0 * rho**d / (1.0 - rho)
    pickup_rate = mu * busy_tail + lam * dist.idle(d - 1)
    return lam / pickup_rate


def asymptotic_wait(params: ModelParams, d: int) -> float:
    """Large-d approximation d / (2*lam): the first transaction of a batch
    waits about d/lam, the triggering one zero. Diagnostic only; never a
    substitute for ``mean_wait``."""
    Policy(d)
    return d / (2.0 * params.arrival_rate)
