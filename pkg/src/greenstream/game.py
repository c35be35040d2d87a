"""Follower best responses, policy evaluation and the Stackelberg grid search."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .allocation import DEFAULT_ADMIN_RATE, OutcomeMetrics, allocate_budget, evaluate_outcome
from .incentives import (
    GameConfig,
    OfferPolicy,
    RANK_BY_CONSUMPTION,
    RewardAssignment,
    acceptance_prob_gamified,
    resolve_rewards_fixed_point,
    sample_offers,
)
from .model import ModelConstants, utility
from .population import (
    DEFAULT_ENERGY_PRICE,
    DEFAULT_LAMBDA_MU,
    Population,
    UserProfile,
)

MODE_EXPECTED = "expected"
MODE_MONTE_CARLO = "mc"


def point_seed(base_seed: int, *indices: int) -> int:
    """Deterministic 64-bit seed for one sweep point.

    Derived through numpy's SeedSequence from the base seed and the point's
    indices, so a sweep is reproducible from its base seed alone and any row
    can be recomputed from the seed stored in the log.
    """
    ss = np.random.SeedSequence([int(base_seed), *[int(i) for i in indices]])
    return int(ss.generate_state(1, np.uint64)[0])


def best_response(user: UserProfile, h_n: float, r_n: float, candidates=None,
                  lambda_mu: float = None, energy_price: float = None,
                  consts: ModelConstants = None):
    """Bitrate maximizing the user's monetized total payoff.

    Any bitrate below x_h counts as taking the green action and earns the
    effective incentive r_n + h_n plus the bill savings of the reduction;
    staying at x_h earns nothing. The default candidate set is the binary
    {x_l, x_h}; ties resolve toward the lower bitrate.
    """
    lam = DEFAULT_LAMBDA_MU if lambda_mu is None else lambda_mu
    price = DEFAULT_ENERGY_PRICE if energy_price is None else energy_price
    consts = consts or ModelConstants()
    if candidates is None:
        candidates = (user.x_l, user.x_h)
    cand = np.sort(np.asarray(candidates, dtype=float))
    if cand.size == 0:
        raise ValueError("candidate set must be non-empty")
    if np.any(cand < user.x_l) or np.any(cand > user.x_h):
        raise ValueError("candidates must lie in [x_l, x_h]")
    gamma_eff = min(user.gamma, consts.x_max / user.x_h)
    scores = lam * np.asarray(utility(cand, gamma_eff, consts), dtype=float)
    green = cand < user.x_h
    savings = price * consts.alpha * (user.x_h - cand)
    scores = scores + green * (r_n + h_n + savings)
    return float(cand[int(np.argmax(scores))])


def best_response_bitrates(pop: Population, r_hat, reward_values) -> np.ndarray:
    """Vectorized binary best responses for a whole population.

    A user goes green when the effective incentive covers the monetized net
    loss of switching (equivalently, when the acceptance probability is at
    least one half).
    """
    effective = np.asarray(r_hat, dtype=float) + np.asarray(reward_values, dtype=float)
    green = effective >= pop.net_benefit_loss
    return np.where(green, pop.x_l, pop.x_h)


@dataclass(frozen=True)
class PolicyEvaluation:
    """Everything produced by one run of the incentive pipeline."""

    metrics: OutcomeMetrics
    offers: np.ndarray
    r_hat: np.ndarray
    rewards: RewardAssignment
    p_final: np.ndarray
    x_star: np.ndarray
    realized_switchers: float | None = None
    realized_traffic: float | None = None
    realized_energy: float | None = None


def evaluate_policy(pop: Population, policy: OfferPolicy, k: int, m: int, h: float,
                    budget: float, seed, mode: str = MODE_EXPECTED, reps: int = 20,
                    admin_rate: float = DEFAULT_ADMIN_RATE,
                    ranking: str = RANK_BY_CONSUMPTION) -> PolicyEvaluation:
    """Run the full pipeline for one provider strategy.

    Offers are sampled, rewards settled, the budget enforced, probabilities
    refreshed from the final offers and the outcome aggregated at the users'
    best responses. Monte Carlo mode additionally draws Bernoulli
    acceptances for `reps` replications and reports mean realized counts.
    """
    GameConfig(k=k, m=m, h=h, budget=budget).validate(pop.n)
    rng = np.random.default_rng(seed)
    offers = sample_offers(policy, pop, rng)
    rewards, p = resolve_rewards_fixed_point(pop, offers, k, m, h, metric=ranking)
    r_hat = allocate_budget(pop, offers, p, pop.de_max, budget)
    p_final = acceptance_prob_gamified(r_hat, rewards.values, pop.r_min, pop.delta)
    x_star = best_response_bitrates(pop, r_hat, rewards.values)
    metrics = evaluate_outcome(pop, r_hat, p_final, x_star, budget, admin_rate)

    realized_sw = realized_traffic = realized_energy = None
    if mode == MODE_MONTE_CARLO:
        if reps < 1:
            raise ValueError("reps must be >= 1")
        moving = x_star < pop.x_h
        sw, tr, en = [], [], []
        for _ in range(reps):
            accepted = rng.random(pop.n) < p_final
            switched = accepted & moving
            sw.append(int(switched.sum()))
            tr.append(float(pop.dx_max[switched].sum()))
            en.append(float(pop.de_max[switched].sum()))
        realized_sw = float(np.mean(sw))
        realized_traffic = float(np.mean(tr))
        realized_energy = float(np.mean(en))
    elif mode != MODE_EXPECTED:
        raise ValueError(f"unknown mode {mode!r}")

    return PolicyEvaluation(
        metrics=metrics, offers=offers, r_hat=r_hat, rewards=rewards,
        p_final=p_final, x_star=x_star,
        realized_switchers=realized_sw, realized_traffic=realized_traffic,
        realized_energy=realized_energy,
    )


@dataclass(frozen=True)
class StrategyGrid:
    """Provider's strategy space for the equilibrium search."""

    k_values: tuple = (0, 10, 50, 100, 150, 200)
    m_values: tuple = (0, 10, 50, 100, 150, 200)
    mu_values: tuple = (1.0, 2.0, 3.0, 4.0, 6.0)
    sigma_values: tuple = (0.5, 1.0, 2.0, 3.0)
    h: float = 1000.0
    budget: float = 1.0
    family: str = "normal"
    targeting: str = "random"
    lognormal_param: str = "moment"

    def validate(self) -> None:
        for name in ("k_values", "m_values", "mu_values", "sigma_values"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")


@dataclass(frozen=True)
class EquilibriumResult:
    """Argmax of the sweep plus the full point log."""

    k_star: int
    m_star: int
    mu_star: float
    sigma_star: float
    metrics: OutcomeMetrics
    realized_switchers: float | None
    per_user_bitrates: np.ndarray
    sweep: list = field(default_factory=list)


def _sweep_row(k, m, mu, sigma, h, budget, seed, ev: PolicyEvaluation) -> dict:
    me = ev.metrics
    return {
        "k": k, "m": m, "mu": mu, "sigma": sigma, "h": h, "budget": budget,
        "seed": seed,
        "spend": me.expected_spend,
        "traffic_kbps": me.expected_traffic_reduction,
        "traffic_pct": me.traffic_reduction_pct,
        "energy_w": me.expected_energy_reduction,
        "co2_g": me.expected_co2_reduction,
        "switchers_expected": me.expected_switchers,
        "switchers_realized": ev.realized_switchers,
    }


def better_point(candidate: dict, incumbent: dict) -> bool:
    """Argmax order: energy first, then smaller spend, k, m, mu, sigma."""
    ck = (candidate["energy_w"], -candidate["spend"], -candidate["k"],
          -candidate["m"], -candidate["mu"], -candidate["sigma"])
    ik = (incumbent["energy_w"], -incumbent["spend"], -incumbent["k"],
          -incumbent["m"], -incumbent["mu"], -incumbent["sigma"])
    return ck > ik


def stackelberg_search(pop: Population, grid: StrategyGrid, mode: str = MODE_EXPECTED,
                       base_seed: int = 0, reps: int = 20,
                       admin_rate: float = DEFAULT_ADMIN_RATE,
                       ranking: str = RANK_BY_CONSUMPTION) -> EquilibriumResult:
    """Exhaustive sweep of the strategy grid; returns the energy argmax.

    (k, m) pairs exceeding the population size are skipped. Offer draws are
    seeded per (mu, sigma) from the base seed, so game-parameter settings
    are compared on identical draws and every logged row can be reproduced
    from its seed column.
    """
    grid.validate()
    best = None
    best_ev = None
    sweep = []
    for ui, mu in enumerate(grid.mu_values):
        for si, sigma in enumerate(grid.sigma_values):
            seed = point_seed(base_seed, ui, si)
            policy = OfferPolicy(family=grid.family, mu=mu, sigma=sigma,
                                 targeting=grid.targeting,
                                 lognormal_param=grid.lognormal_param)
            for k in grid.k_values:
                for m in grid.m_values:
                    if k + m > pop.n:
                        continue
                    ev = evaluate_policy(pop, policy, k, m, grid.h, grid.budget,
                                         seed, mode=mode, reps=reps,
                                         admin_rate=admin_rate, ranking=ranking)
                    row = _sweep_row(k, m, mu, sigma, grid.h, grid.budget, seed, ev)
                    sweep.append(row)
                    if best is None or better_point(row, best):
                        best, best_ev = row, ev
    return EquilibriumResult(
        k_star=int(best["k"]), m_star=int(best["m"]),
        mu_star=float(best["mu"]), sigma_star=float(best["sigma"]),
        metrics=best_ev.metrics,
        realized_switchers=best_ev.realized_switchers,
        per_user_bitrates=best_ev.x_star,
        sweep=sweep,
    )
