"""Biased Waiter-Client games on complete graphs and abstract boards.

Engine, set-family potentials, graph analysis, construction and avoidance
strategies, an exact small-board solver, an experiment harness, and an
interactive play service.
"""

from .board import Board
from .engine import (CLIENT, FREE, WAITER, BudgetExceededError,
                     ChoiceNotOfferedError, ElementNotFreeError, ForfeitError,
                     GameError, GameRun, GameState, OfferSizeError,
                     ParameterError, apply_round, new_abstract_game, new_game,
                     play_game, run_game)
from .transcripts import ReplayError, Transcript, canonical_json, replay

__version__ = "0.1.0"

__all__ = [
    "Board", "GameState", "GameRun", "Transcript",
    "new_game", "new_abstract_game", "apply_round", "run_game", "play_game",
    "replay", "canonical_json",
    "FREE", "WAITER", "CLIENT",
    "GameError", "OfferSizeError", "ElementNotFreeError",
    "ChoiceNotOfferedError", "BudgetExceededError", "ParameterError",
    "ForfeitError", "ReplayError",
    "__version__",
]
