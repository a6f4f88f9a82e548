"""Solver for two-player parity games with imperfect information."""

from .antichain import Antichain, Cell
from .game import (
    GameStructure,
    Observation,
    ParseReport,
    parse_game,
    render,
    totalize_game,
)
from .pipeline import SolvedGame, solve_game, solve_text
from .solver import SolveResult, solve_parity, transform_objective
from .strategy import StrategyTable, verify_strategy

__version__ = "0.1.0"

__all__ = [
    "Antichain",
    "Cell",
    "GameStructure",
    "Observation",
    "ParseReport",
    "SolveResult",
    "SolvedGame",
    "StrategyTable",
    "parse_game",
    "render",
    "solve_game",
    "solve_parity",
    "solve_text",
    "totalize_game",
    "transform_objective",
    "verify_strategy",
    "__version__",
]
