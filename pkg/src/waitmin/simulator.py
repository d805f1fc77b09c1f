"""Discrete-event simulation of the threshold-batch mining queue.

Poisson arrivals feed a FIFO pool; one miner serves it in exponential
rounds. A round that completes with at least ``d`` queued transactions
picks up the whole pool and immediately starts the next round; with fewer,
the miner idles until an arrival brings the pool to exactly ``d``, picks
everything up at that instant (the triggering transaction waits zero), and
restarts. A transaction's wait ends at pickup: in-round time is excluded.

At most one arrival and one round-completion are pending at any instant,
so the next event falls out of a single float comparison instead of a
priority queue; ties (probability zero, but pinned for determinism)
process the arrival first. Variates come from a seeded PCG64 stream via
the inverse transform -log(1 - U) / rate, drawn in event order, so a seed
fixes the whole trajectory bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats as _scipy_stats

from .model import ModelParams, Policy, ValidationError

__all__ = ["SimConfig", "SimResult", "Event", "EventKind", "run", "replicate"]


class EventKind(Enum):
    ARRIVAL = "arrival"
    MINING_COMPLETE = "mining_complete"


@dataclass(frozen=True)
class Event:
    """One step of the simulated trajectory; times are nondecreasing."""

    time: float
    kind: EventKind


@dataclass(frozen=True)
class SimConfig:
    """Run-length, warm-up, and reproducibility knobs.

    ``num_transactions`` waits are recorded after the first
    ``warmup_transactions`` picked-up transactions are discarded. Within a
    replication the 95% confidence interval comes from ``batch_count``
    batch means; with ``replications >= 2`` it comes from the spread of
    per-replication means instead.
    """

    seed: int = 0
    num_transactions: int = 1_000_000
    warmup_transactions: int = 10_000
    replications: int = 1
    batch_count: int = 30

    def __post_init__(self) -> None:
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.num_transactions < 1:
            raise ValidationError(f"num_transactions must be >= 1, got {self.num_transactions}")
        if self.warmup_transactions < 0:
            raise ValidationError(
                f"warmup_transactions must be >= 0, got {self.warmup_transactions}"
            )
        if self.replications < 1:
            raise ValidationError(f"replications must be >= 1, got {self.replications}")
        if self.batch_count < 2:
            raise ValidationError(f"batch_count must be >= 2, got {self.batch_count}")
        if self.num_transactions < self.batch_count * 100:
            raise ValidationError(
                f"num_transactions must be >= 100 * batch_count = {self.batch_count * 100} "
                f"so each batch has enough samples, got {self.num_transactions}"
            )


@dataclass(frozen=True)
class SimResult:
    """Post-warm-up waiting statistics of one run or a pool of replications."""

    mean_wait: float
    ci_half_width: float
    mean_wait_normalized: float
    recorded: int
    mean_batch_size: float
    miner_idle_fraction: float
    time_avg_queue_length: float
    replications: int


class _ExpStream:
    """Unit-mean exponential variates drawn blockwise from one PCG64 stream.

    Inverse transform on U in [0, 1): -log1p(-U) maps into (0, inf) with
    the U == 0 corner yielding a genuine positive draw, never 0 or inf.
    """

    __slots__ = ("_rng", "_block", "_buf", "_i")

    def __init__(self, rng: np.random.Generator, block: int = 1 << 16):
        self._rng = rng
        self._block = block
        self._buf = -np.log1p(-rng.random(block))
        self._i = 0

    def __call__(self) -> float:
        i = self._i
        if i == self._block:
            self._buf = -np.log1p(-self._rng.random(self._block))
            i = 0
        self._i = i + 1
        return self._buf[i]


@dataclass
class _Trace:
    """Optional per-event/per-pickup record for invariant checks in tests.

    ``idle_entries`` holds (time, queue length) at each completion that
    left the miner short of the threshold; the cold start at t = 0 with an
    empty pool is an implicit extra idle entry.
    """

    events: list
    pickup_times: list
    pickup_sizes: list
    pickup_triggered: list
    idle_entries: list


@dataclass
class _RunStats:
    waits: np.ndarray
    picked_transactions: int
    pickups: int
    miner_idle_fraction: float
    time_avg_queue_length: float
    trace: _Trace | None


def _simulate_once(
    params: ModelParams,
    d: int,
    num_transactions: int,
    warmup_transactions: int,
    rng: np.random.Generator,
    collect: bool = False,
) -> _RunStats:
    """One trajectory: empty pool, idle miner, run until the target count of
    post-warm-up waits is recorded (stopping mid-pickup if needed).

    Time-average statistics cover the window from the pickup completing
    warm-up to the final pickup; if both happen inside a single pickup the
    window falls back to the whole run.
    """
    lam = params.arrival_rate
    inv_lam = 1.0 / lam
    inv_mu = 1.0 / params.service_rate
    draw = _ExpStream(rng)

    trace = _Trace([], [], [], [], []) if collect else None

    waits = np.empty(num_transactions)
    n_done = 0
    n_discarded = 0
    pickups = 0
    picked = 0

    pending: list[float] = []
    append = pending.append
    idle = True
    next_arrival = draw() * inv_lam
    next_completion = math.inf

    last_t = 0.0
    queue_area = 0.0
    idle_time = 0.0
    # window snapshots; started at t=0 when there is no warm-up to wait out
    started = warmup_transactions == 0
    area0 = idle0 = t0 = 0.0

    while True:
        arrival_next = next_arrival <= next_completion
        now = next_arrival if arrival_next else next_completion
        dt = now - last_t
        queue_area += len(pending) * dt
        if idle:
            idle_time += dt
        last_t = now

        pick = False
        if arrival_next:
            if collect:
                trace.events.append(Event(now, EventKind.ARRIVAL))
            append(now)
            # an idle miner starts the instant the pool reaches the threshold
            pick = idle and len(pending) == d
            next_arrival = now + draw() * inv_lam
        else:
            if collect:
                trace.events.append(Event(now, EventKind.MINING_COMPLETE))
            if len(pending) >= d:
                pick = True
            else:
                idle = True
                if collect:
                    trace.idle_entries.append((now, len(pending)))
                next_completion = math.inf

        if pick:
            size = len(pending)
            recorded_before = n_done
            for arrived in pending:
                if n_discarded < warmup_transactions:
                    n_discarded += 1
                elif n_done < num_transactions:
                    waits[n_done] = now - arrived
                    n_done += 1
            pending.clear()
            if collect:
                trace.pickup_times.append(now)
                trace.pickup_sizes.append(size)
                trace.pickup_triggered.append(idle)
            idle = False
            next_completion = now + draw() * inv_mu
            if n_done > recorded_before:
                pickups += 1
                picked += size
            if not started and n_discarded == warmup_transactions:
                started = True
                area0, idle0, t0 = queue_area, idle_time, now
            if n_done == num_transactions:
                break

    span = last_t - t0
    if span <= 0.0:
        area0 = idle0 = t0 = 0.0
        span = last_t
    return _RunStats(
        waits=waits,
        picked_transactions=picked,
        pickups=pickups,
        miner_idle_fraction=(idle_time - idle0) / span,
        time_avg_queue_length=(queue_area - area0) / span,
        trace=trace,
    )


def _t_quantile(df: int) -> float:
    """Two-sided 95% Student-t quantile."""
    return float(_scipy_stats.t.ppf(0.975, df))


def _batch_means_half_width(waits: np.ndarray, batch_count: int) -> float:
    """95% half-width from nearly equal batches of the waits in pickup order."""
    batch_means = np.array([b.mean() for b in np.array_split(waits, batch_count)])
    spread = float(batch_means.std(ddof=1))
    return _t_quantile(batch_count - 1) * spread / math.sqrt(batch_count)


def _run_stats_to_result(stats: _RunStats, params: ModelParams, config: SimConfig) -> SimResult:
    mean = float(stats.waits.mean())
    return SimResult(
        mean_wait=mean,
        ci_half_width=_batch_means_half_width(stats.waits, config.batch_count),
        mean_wait_normalized=params.service_rate * mean,
        recorded=len(stats.waits),
        mean_batch_size=stats.picked_transactions / stats.pickups,
        miner_idle_fraction=stats.miner_idle_fraction,
        time_avg_queue_length=stats.time_avg_queue_length,
        replications=1,
    )


def run(params: ModelParams, d: int, config: SimConfig) -> SimResult:
    """Simulate one trajectory under ``config.seed`` and summarize it."""
    Policy(d)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed)))
    stats = _simulate_once(
        params, d, config.num_transactions, config.warmup_transactions, rng
    )
    return _run_stats_to_result(stats, params, config)


def replication_seed_sequence(seed: int, index: int) -> np.random.SeedSequence:
    """Seed derivation: replication 0 uses the master seed unchanged (so a
    single replication reproduces ``run`` exactly); replication ``i >= 1``
    uses ``SeedSequence(seed, spawn_key=(i,))``, numpy's standard mechanism
    for independent child streams."""
    if index == 0:
        return np.random.SeedSequence(seed)
    return np.random.SeedSequence(seed, spawn_key=(index,))


def replicate(params: ModelParams, d: int, config: SimConfig) -> SimResult:
    """Run ``config.replications`` independent trajectories and pool them.

    With one replication this is ``run`` verbatim, batch-means interval
    included. With more, the pooled mean is the average of per-replication
    means and the 95% interval comes from their spread (Student-t,
    ``replications - 1`` degrees of freedom).
    """
    Policy(d)
    if config.replications == 1:
        return run(params, d, config)

    runs = []
    for i in range(config.replications):
        rng = np.random.Generator(np.random.PCG64(replication_seed_sequence(config.seed, i)))
        runs.append(
            _simulate_once(params, d, config.num_transactions, config.warmup_transactions, rng)
        )

    rep_means = np.array([float(r.waits.mean()) for r in runs])
    n = len(runs)
    mean = float(rep_means.mean())
    half_width = _t_quantile(n - 1) * float(rep_means.std(ddof=1)) / math.sqrt(n)
    return SimResult(
        mean_wait=mean,
        ci_half_width=half_width,
        mean_wait_normalized=params.service_rate * mean,
        recorded=sum(len(r.waits) for r in runs),
        mean_batch_size=sum(r.picked_transactions for r in runs) / sum(r.pickups for r in runs),
        miner_idle_fraction=float(np.mean([r.miner_idle_fraction for r in runs])),
        time_avg_queue_length=float(np.mean([r.time_avg_queue_length for r in runs])),
        replications=n,
    )
