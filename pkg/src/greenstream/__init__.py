"""Gamified-incentive simulation engine for energy-aware video streaming."""

__version__ = "0.1.0"

from .model import (
    ModelConstants,
    bitrate_from_energy,
    co2,
    delta_u_of_delta_e,
    delta_utility,
    energy_reduction,
    mos,
    session_energy,
    utility,
)
from .population import (
    Population,
    PopulationConfig,
    UserProfile,
    calibrate_lambda,
    generate,
    min_incentive,
)
from .incentives import (
    GameConfig,
    OfferPolicy,
    RewardAssignment,
    acceptance_prob,
    acceptance_prob_gamified,
    assign_rewards,
    resolve_rewards_fixed_point,
    sample_offers,
)
from .allocation import OutcomeMetrics, allocate_budget, evaluate_outcome, expected_spend
from .game import (
    EquilibriumResult,
    PolicyEvaluation,
    StrategyGrid,
    best_response,
    evaluate_policy,
    stackelberg_search,
)

__all__ = [
    "ModelConstants", "mos", "utility", "delta_utility", "session_energy",
    "energy_reduction", "bitrate_from_energy", "co2", "delta_u_of_delta_e",
    "Population", "PopulationConfig", "UserProfile", "generate",
    "min_incentive", "calibrate_lambda",
    "OfferPolicy", "GameConfig", "RewardAssignment", "sample_offers",
    "acceptance_prob", "acceptance_prob_gamified", "assign_rewards",
    "resolve_rewards_fixed_point",
    "OutcomeMetrics", "expected_spend", "allocate_budget", "evaluate_outcome",
    "StrategyGrid", "EquilibriumResult", "PolicyEvaluation", "best_response",
    "evaluate_policy", "stackelberg_search",
]
