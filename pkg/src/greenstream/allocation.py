"""Budget-constrained greedy incentive allocation and outcome metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import co2
from .population import Population

DEFAULT_ADMIN_RATE = 0.04  # MU per expected accepted offer, reported only


@dataclass(frozen=True)
class OutcomeMetrics:
    """Expected outcome of one policy evaluation."""

    expected_traffic_reduction: float   # kbps
    traffic_reduction_pct: float        # % of baseline traffic
    expected_energy_reduction: float    # W
    expected_co2_reduction: float       # g
    expected_spend: float               # MU
    admin_cost: float                   # MU, outside the budget constraint
    expected_switchers: float           # probability-weighted moving users
    budget: float                       # MU


def expected_spend(p, r) -> float:
    """Provider's probabilistic outlay sum(p * r)."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    if p.shape != r.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {r.shape}")
    return float(p @ r)


def allocate_budget(pop: Population, r, p, de, budget: float) -> np.ndarray:
    """Fit the offer vector to the budget, keeping the most efficient users.

    If the expected spend already fits, offers pass through unchanged.
    Otherwise users are ranked by potential energy reduction per offered MU
    (zero offers rank first: funding them is free; ties prefer the larger
    reduction, then the lower user id) and offers are kept in that order
    until the next one would push the running expected spend past the
    budget. Whatever budget remains is split into equal offers over the
    users whose original offers were dropped.
    """
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    de = np.asarray(de, dtype=float)
    n = len(r)
    if not (len(p) == len(de) == n):
        raise ValueError("r, p and de must have equal length")
    if budget < 0:
        raise ValueError("budget must be >= 0")
    if np.any(r < 0) or np.any(de < 0):
        raise ValueError("offers and reductions must be >= 0")

    if expected_spend(p, r) <= budget:
        return r.copy()

    with np.errstate(divide="ignore"):
        efficiency = np.where(r > 0, de / np.where(r > 0, r, 1.0), np.inf)
    order = np.lexsort((np.arange(n), -de, -efficiency))
    cumulative = np.cumsum((p * r)[order])
    n_kept = int(np.searchsorted(cumulative, budget, side="right"))

    r_hat = np.zeros(n)
    kept = order[:n_kept]
    r_hat[kept] = r[kept]
    spent = float(cumulative[n_kept - 1]) if n_kept else 0.0
    remaining = order[n_kept:]
    remainder = budget - spent
    if len(remaining) and remainder > 0:
        r_hat[remaining] = remainder / len(remaining)
    return r_hat


def evaluate_outcome(pop: Population, r_hat, p_final, x_target, budget: float,
                     admin_rate: float = DEFAULT_ADMIN_RATE) -> OutcomeMetrics:
    """Aggregate expected reductions, spend and switch counts.

    x_target is each user's chosen bitrate; users staying at their high
    bitrate contribute nothing to the reduction sums regardless of their
    acceptance probability.
    """
    r_hat = np.asarray(r_hat, dtype=float)
    p_final = np.asarray(p_final, dtype=float)
    x_target = np.asarray(x_target, dtype=float)
    if not (len(r_hat) == len(p_final) == len(x_target) == pop.n):
        raise ValueError("per-user vectors must match the population size")
    if np.any(x_target > pop.x_h) or np.any(x_target <= 0):
        raise ValueError("target bitrates must lie in (0, x_h]")

    reduction = pop.x_h - x_target
    traffic = float(p_final @ reduction)
    energy = pop.consts.alpha * traffic
    moving = x_target < pop.x_h
    switchers = float(p_final[moving].sum())
    return OutcomeMetrics(
        expected_traffic_reduction=traffic,
        traffic_reduction_pct=100.0 * traffic / pop.baseline_traffic,
        expected_energy_reduction=energy,
        expected_co2_reduction=float(co2(energy, pop.consts)),
        expected_spend=expected_spend(p_final, r_hat),
        admin_cost=admin_rate * switchers,
        expected_switchers=switchers,
        budget=float(budget),
    )
