"""Discounted perfect-information stochastic games in exact arithmetic."""

from .equilibrium import (
    Infeasible,
    action_valuations,
    best_response,
    evaluate_payoffs,
    induced_valuation,
    one_step_optimal_check,
    recover_profile,
    updated_valuation,
    verify_epsilon_nash,
)
from .game import (
    Action,
    GameFormatError,
    State,
    StochasticGame,
    game_from_json,
    game_to_json,
    profile_from_json,
    profile_to_json,
    pure_profile,
    validate_game,
)
from .numeric import QuadExt, RationalInterval, Sign, quad_sign, sqrt_enclosure
from .solver2p import SolveResult, SolverConfig, snap_and_certify, solve2p

__version__ = "0.1.0"

__all__ = [
    "Action", "GameFormatError", "Infeasible", "QuadExt", "RationalInterval", "Sign", "SolveResult",
    "SolverConfig", "State", "StochasticGame", "action_valuations", "best_response", "evaluate_payoffs",
    "game_from_json", "game_to_json", "induced_valuation", "one_step_optimal_check", "profile_from_json",
    "profile_to_json", "pure_profile", "quad_sign", "recover_profile", "snap_and_certify", "solve2p",
    "sqrt_enclosure", "updated_valuation", "validate_game", "verify_epsilon_nash",
]
