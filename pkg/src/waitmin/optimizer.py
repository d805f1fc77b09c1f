"""Exact integer minimization of the mean wait over the batch threshold.

The mean wait grows like d / (2 * lam) once d is well past lam / mu, so an
exhaustive scan of 1..~3*lam/mu is both sufficient and cheap (each
evaluation is O(1)). The scan never assumes unimodality; it verifies
afterwards that the curve has turned back up by the end of the range and
reports a bound failure otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import mean_wait, mean_wait_d1
from .model import ModelParams, ValidationError

__all__ = ["OptimizeResult", "BoundTooSmallError", "find_d_star", "heuristic_d_star"]


class BoundTooSmallError(RuntimeError):
    """The searched range cannot rule out a minimizer beyond its upper end."""

    def __init__(self, bound: int, w_at_bound: float, w_star: float):
        self.bound = bound
        self.w_at_bound = w_at_bound
        self.w_star = w_star
        super().__init__(
            f"search bound {bound} too small: w({bound}) = {w_at_bound:.12g} does not "
            f"exceed the running minimum {w_star:.12g}; retry with a larger bound"
        )


@dataclass(frozen=True)
class OptimizeResult:
    """Outcome of the threshold scan.

    ``d_star`` is the smallest minimizer over 1..search_bound, ``w_star``
    its mean wait, ``w_baseline`` the no-wait mean wait, ``reduction`` the
    relative saving (0 exactly when waiting does not help), and
    ``d_heuristic`` the rule-of-thumb ceil(0.9 * lam / mu) for comparison.
    """

    d_star: int
    w_star: float
    w_baseline: float
    reduction: float
    d_heuristic: int
    search_bound: int


def heuristic_d_star(params: ModelParams) -> int:
    """Rule-of-thumb threshold max(1, ceil(0.9 * lam / mu))."""
    return max(1, math.ceil(0.9 * params.load_ratio))


def default_search_bound(params: ModelParams) -> int:
    return max(math.ceil(3.0 * params.load_ratio), 16)


def find_d_star(params: ModelParams, search_bound: int | None = None) -> OptimizeResult:
    """Exhaustively scan d = 1..search_bound for the smallest minimizer.

    Ties break toward smaller d. Raises ``BoundTooSmallError`` when the
    wait at the bound has not risen back above the minimum, since the true
    minimizer could then lie beyond the scanned range.
    """
    if search_bound is not None and search_bound < 1:
        raise ValidationError(f"search_bound must be >= 1, got {search_bound}")
    bound = search_bound if search_bound is not None else default_search_bound(params)

    d_star = 1
    w_star = mean_wait(params, 1).w_bar
    w_last = w_star
    for d in range(2, bound + 1):
        w_last = mean_wait(params, d).w_bar
        if w_last < w_star:
            d_star, w_star = d, w_last
    if w_last <= w_star:
        raise BoundTooSmallError(bound, w_last, w_star)

    w_baseline = mean_wait_d1(params)
    return OptimizeResult(
        d_star=d_star,
        w_star=w_star,
        w_baseline=w_baseline,
        reduction=(w_baseline - w_star) / w_baseline,
        d_heuristic=heuristic_d_star(params),
        search_bound=bound,
    )
