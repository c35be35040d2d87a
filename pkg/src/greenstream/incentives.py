"""Offer sampling, serious-game reward assignment and acceptance probabilities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .population import Population

NORMAL = "normal"
LOGNORMAL = "lognormal"
TARGET_RANDOM = "random"
TARGET_BY_CONSUMPTION = "by_consumption_desc"
# Lognormal parameterizations: "moment" matches mean=mu, sd=sigma exactly;
# "log_space" subtracts sigma^2/2 in log space, giving a much smaller mean
# for sigma near mu (the variant used by the figure scenarios).
LN_MOMENT = "moment"
LN_LOG_SPACE = "log_space"


@dataclass(frozen=True)
class OfferPolicy:
    """Provider's incentive distribution and targeting rule."""

    family: str = NORMAL
    mu: float = 1.0              # MU, distribution mean parameter
    sigma: float = 0.5           # MU, distribution sd parameter
    targeting: str = TARGET_RANDOM
    lognormal_param: str = LN_MOMENT

    def validate(self) -> None:
        if self.family not in (NORMAL, LOGNORMAL):
            raise ValueError(f"unknown offer family {self.family!r}")
        if self.targeting not in (TARGET_RANDOM, TARGET_BY_CONSUMPTION):
            raise ValueError(f"unknown targeting {self.targeting!r}")
        if self.lognormal_param not in (LN_MOMENT, LN_LOG_SPACE):
            raise ValueError(f"unknown lognormal parameterization {self.lognormal_param!r}")
        if self.mu <= 0:
            raise ValueError("mu must be > 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class GameConfig:
    """Serious-game parameters and the provider budget."""

    k: int = 0
    m: int = 0
    h: float = 0.0       # MU, social reward magnitude
    budget: float = 0.0  # MU

    def validate(self, n_users: int) -> None:
        if self.k < 0 or self.m < 0:
            raise ValueError("k and m must be >= 0")
        if self.k + self.m > n_users:
            raise ValueError(f"k + m = {self.k + self.m} exceeds population size {n_users}")
        if self.h < 0 or self.budget < 0:
            raise ValueError("h and budget must be >= 0")


@dataclass(frozen=True)
class RewardAssignment:
    """Per-user reward vector with the top/bottom membership index sets."""

    values: np.ndarray          # +h, -h or 0 per user
    top: frozenset              # user ids holding +h
    bottom: frozenset           # user ids holding -h

    def membership(self):
        return (self.top, self.bottom)


def sample_offers(policy: OfferPolicy, pop: Population, seed) -> np.ndarray:
    """Sample one offer per user; offers are never negative.

    Normal draws are clamped at zero. Lognormal draws use
    rho^2 = ln(1 + sigma^2/mu^2) and nu = ln(mu) - rho^2/2 (moment matched)
    or nu = ln(mu) - sigma^2/2 (log-space variant). Targeting "random" keeps
    draw order; "by_consumption_desc" gives the largest draw to the largest
    baseline consumer, ties by user id.
    """
    policy.validate()
    rng = np.random.default_rng(seed)
    n = pop.n
    if policy.family == NORMAL:
        r = np.maximum(rng.normal(policy.mu, policy.sigma, n), 0.0)
    else:
        rho2 = np.log1p(policy.sigma**2 / policy.mu**2)
        if policy.lognormal_param == LN_MOMENT:
            nu = np.log(policy.mu) - rho2 / 2.0
        else:
            nu = np.log(policy.mu) - policy.sigma**2 / 2.0
        r = rng.lognormal(nu, np.sqrt(rho2), n)
    if policy.targeting == TARGET_BY_CONSUMPTION:
        heavy_first = np.lexsort((np.arange(n), -pop.baseline_consumption))
        out = np.empty(n)
        out[heavy_first] = np.sort(r)[::-1]
        return out
    return r


def acceptance_prob(r, r_min, delta):
    """Probability that an offer r is accepted: sigmoid in (r - r_min).

    Equals 1/2 exactly at r = r_min, is strictly increasing in r and
    saturates to 0 or 1 without overflowing for extreme arguments.
    """
    if np.any(np.asarray(delta) <= 0):
        raise ValueError("delta must be > 0")
    out = expit(np.asarray(delta, dtype=float) * (np.asarray(r, dtype=float) - r_min))
    return out if out.ndim else float(out)


def acceptance_prob_gamified(r, h, r_min, delta):
    """Acceptance under the effective incentive r + h (social reward included)."""
    return acceptance_prob(np.asarray(r, dtype=float) + h, r_min, delta)


def assign_rewards(pop: Population, ranking_values, k: int, m: int, h: float) -> RewardAssignment:
    """Give +h to the k highest-ranked users and -h to the m lowest.

    ranking_values are sorted descending; ties break by ascending user id.
    """
    n = pop.n
    if k + m > n:
        raise ValueError(f"k + m = {k + m} exceeds population size {n}")
    order = np.lexsort((np.arange(n), -np.asarray(ranking_values, dtype=float)))
    values = np.zeros(n)
    top = order[:k]
    bottom = order[n - m:] if m else order[:0]
    values[top] = h
    values[bottom] = -h
    return RewardAssignment(values=values, top=frozenset(top.tolist()),
                            bottom=frozenset(bottom.tolist()))


RANK_BY_CONSUMPTION = "baseline_consumption"
RANK_BY_EXPECTED_REDUCTION = "expected_reduction"


def resolve_rewards_fixed_point(pop: Population, offers, k: int, m: int, h: float,
                                max_rounds: int = 20,
                                metric: str = RANK_BY_CONSUMPTION):
    """Determine the reward assignment and the acceptance probabilities.

    With the default metric the leaderboard orders users by baseline session
    energy, lightest consumer first; the ranking does not depend on the
    acceptance outcome, so a single pass settles it.

    With metric="expected_reduction" users are ranked by their expected
    energy reduction, which itself moves with the rewards: round zero scores
    everyone without rewards, then each round re-ranks, re-assigns and
    recomputes probabilities until the membership sets repeat or max_rounds
    is hit. If the iteration falls into a cycle, the round in the cycle with
    the largest total expected reduction wins.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    offers = np.asarray(offers, dtype=float)

    if metric == RANK_BY_CONSUMPTION:
        assignment = assign_rewards(pop, -pop.baseline_consumption, k, m, h)
        p = acceptance_prob_gamified(offers, assignment.values, pop.r_min, pop.delta)
        return assignment, p
    if metric != RANK_BY_EXPECTED_REDUCTION:
        raise ValueError(f"unknown ranking metric {metric!r}")

    p = acceptance_prob(offers, pop.r_min, pop.delta)
    reductions = p * pop.de_max
    zero = RewardAssignment(values=np.zeros(pop.n), top=frozenset(), bottom=frozenset())
    history = [(zero, p, float(reductions.sum()))]
    seen = {zero.membership(): 0}
    for rnd in range(1, max_rounds + 1):
        assignment = assign_rewards(pop, reductions, k, m, h)
        p = acceptance_prob_gamified(offers, assignment.values, pop.r_min, pop.delta)
        reductions = p * pop.de_max
        entry = (assignment, p, float(reductions.sum()))
        if history[-1][0].membership() == assignment.membership():
            return assignment, p
        if assignment.membership() in seen:
            cycle = history[seen[assignment.membership()]:] + [entry]
            best = max(cycle, key=lambda e: e[2])
            return best[0], best[1]
        seen[assignment.membership()] = rnd
        history.append(entry)
    best = max(history, key=lambda e: e[2])
    return best[0], best[1]
