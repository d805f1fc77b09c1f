"""Brute-force ground truth: explicit truncated Markov chain of the mining queue.

Instead of the closed forms, this module writes down the full generator
matrix of the busy/idle chain (busy tail truncated at ``n_max``) and solves
the global-balance system ``pi @ Q = 0,  sum(pi) = 1`` by dense Gaussian
elimination, with the normalization equation replacing one redundant
balance row. It exists to independently verify the closed-form module and
is deliberately unsophisticated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams, Policy, ValidationError

__all__ = ["TruncatedChain", "build_chain", "solve_stationary", "oracle_mean_wait"]

# Truncating the busy tail at n_max discards stationary mass ~ rho**n_max * p0.
# The default n_max pushes that below this target so truncation bias stays
# well under every comparison tolerance used against the closed forms.
_TAIL_MASS_TARGET = 1e-12
_N_MAX_CAP = 20_000


class SolverError(RuntimeError):
    """Raised when the balance system cannot be solved reliably."""


def default_n_max(params: ModelParams, d: int) -> int:
    """Smallest truncation level with closed-form tail mass below target,
    capped at 20,000 states."""
    extra = math.ceil(math.log(_TAIL_MASS_TARGET) / math.log(params.rho))
    return min(d + max(extra, 20), _N_MAX_CAP)


@dataclass(frozen=True)
class TruncatedChain:
    """Finite chain over states M_0..M_{d-1}, N_0..N_{n_max}, in that order.

    ``generator[i, j]`` is the transition rate from state i to state j; the
    diagonal is minus the row's off-diagonal sum, so every row sums to 0.
    The arrival transition out of N_{n_max} is dropped (the boundary
    arrival is ignored), which biases results by no more than the discarded
    tail mass.
    """

    params: ModelParams
    d: int
    n_max: int
    states: tuple = field(repr=False)
    generator: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.d + self.n_max + 1

    def index(self, kind: str, i: int) -> int:
        """Row/column index of state ('M', i) or ('N', i)."""
        if kind == "M":
            if not 0 <= i < self.d:
                raise ValidationError(f"M-state index must be in [0, {self.d - 1}], got {i}")
            return i
        if kind == "N":
            if not 0 <= i <= self.n_max:
                raise ValidationError(f"N-state index must be in [0, {self.n_max}], got {i}")
            return self.d + i
        raise ValidationError(f"state kind must be 'M' or 'N', got {kind!r}")


def build_chain(params: ModelParams, d: int, n_max: int | None = None) -> TruncatedChain:
    """Assemble the generator matrix for threshold ``d``.

    Transitions:
      N_i --lam--> N_{i+1}          (arrival while mining)
      N_i --mu-->  M_i   (i < d)    (round done, too few queued: go idle)
      N_i --mu-->  N_0   (i >= d)   (round done, batch picked up, next round)
      M_i --lam--> M_{i+1} (i < d-1)(arrival while idle, still below threshold)
      M_{d-1} --lam--> N_0          (arrival reaches threshold: instant pickup)
    """
    Policy(d)
    if n_max is None:
        n_max = default_n_max(params, d)
    if n_max < d + 20:
        raise ValidationError(f"n_max must be >= d + 20 = {d + 20}, got {n_max}")

    lam, mu = params.arrival_rate, params.service_rate
    size = d + n_max + 1
    q = np.zeros((size, size))
    states = tuple([("M", i) for i in range(d)] + [("N", i) for i in range(n_max + 1)])

    def idx(kind: str, i: int) -> int:
        return i if kind == "M" else d + i

    for i in range(n_max + 1):
        src = idx("N", i)
        if i < n_max:
            q[src, idx("N", i + 1)] += lam
        if i < d:
            q[src, idx("M", i)] += mu
        else:
            q[src, idx("N", 0)] += mu
    for i in range(d - 1):
        q[idx("M", i), idx("M", i + 1)] += lam
    q[idx("M", d - 1), idx("N", 0)] += lam

    np.fill_diagonal(q, -q.sum(axis=1))
    return TruncatedChain(params=params, d=d, n_max=n_max, states=states, generator=q)


def solve_stationary(chain: TruncatedChain) -> np.ndarray:
    """Solve pi @ Q = 0 with sum(pi) = 1; returns the probability vector.

    The transposed balance system is rank-deficient by one, so the last
    equation is replaced by the normalization row before the dense solve.
    """
    size = chain.size
    a = chain.generator.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(size)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"stationary balance system is singular: {exc}") from exc

    residual = float(np.abs(pi @ chain.generator).max())
    if not np.isfinite(pi).all() or residual > 1e-9:
        raise SolverError(f"stationary solve did not converge (residual {residual:.3e})")
    if pi.min() < -1e-12:
        raise SolverError(f"stationary solve produced negative mass ({pi.min():.3e})")
    # scrub the harmless sub-tolerance negatives truncation can leave behind
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def oracle_mean_wait(chain: TruncatedChain, pi: np.ndarray | None = None) -> float:
    """Mean wait from the solved chain: sum_l l * P[queue == l] / lam,
    where P[queue == l] pools the busy and idle states with l queued."""
    if pi is None:
        pi = solve_stationary(chain)
    queue_lengths = np.array([i for (_, i) in chain.states], dtype=float)
    return float((queue_lengths * pi).sum() / chain.params.arrival_rate)
