"""Threshold-batch mining queue: closed forms, optimizer, and simulator.

A miner drains a transaction pool in exponential rounds and only starts a
round once at least ``d`` transactions are queued. This package carries
the closed-form stationary analysis of that policy, an exhaustive
threshold optimizer, a discrete-event simulator for cross-checking, and a
sweep/plot layer for producing datasets.
"""

from .analytic import (
    AnalyticSummary,
    StationaryDistribution,
    asymptotic_wait,
    mean_batch_size,
    mean_queue_length,
    mean_wait,
    mean_wait_d1,
    pi_n0,
)
from .model import ModelParams, Policy, ValidationError, new_params
from .optimizer import BoundTooSmallError, OptimizeResult, find_d_star, heuristic_d_star
from .simulator import SimConfig, SimResult, replicate, run
from .sweeps import SweepSpec, load_config, parse_config, run_config, run_sweep

__version__ = "0.1.0"

__all__ = [
    "AnalyticSummary",
    "BoundTooSmallError",
    "ModelParams",
    "OptimizeResult",
    "Policy",
    "SimConfig",
    "SimResult",
    "StationaryDistribution",
    "SweepSpec",
    "ValidationError",
    "asymptotic_wait",
    "find_d_star",
    "heuristic_d_star",
    "load_config",
    "mean_batch_size",
    "mean_queue_length",
    "mean_wait",
    "mean_wait_d1",
    "new_params",
    "parse_config",
    "pi_n0",
    "replicate",
    "run",
    "run_config",
    "run_sweep",
    "__version__",
]
