"""End-to-end solving pipeline shared by the CLI and the HTTP service."""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import strategy as strategy_mod
from .game import GameStructure, ParseReport, parse_game
from .solver import SolveResult, make_cpre, solve_parity, transform_objective
from .strategy import StrategyTable


@dataclass
class SolvedGame:
    report: ParseReport
    transformed: GameStructure
    result: SolveResult
    table: StrategyTable
    times: dict[str, float]

    @property
    def winning(self) -> bool:
        return self.result.initial_winning


def solve_text(
    text: str,
    totalize: bool = True,
    cpre_kind: str = "symbolic",
    simplify: bool = True,
    x_first: bool = False,
) -> SolvedGame:
    t0 = time.perf_counter()
    report = parse_game(text, totalize=totalize)
    t_parse = time.perf_counter() - t0
    solved = solve_game(report.game, cpre_kind=cpre_kind, simplify=simplify, x_first=x_first)
    solved.report = report
    solved.times["parse"] = t_parse
    return solved


def solve_game(
    game: GameStructure,
    cpre_kind: str = "symbolic",
    simplify: bool = True,
    x_first: bool = False,
) -> SolvedGame:
    transformed = transform_objective(game)
    cpre, t_encode = make_cpre(transformed, cpre_kind, x_first=x_first)
    result = solve_parity(transformed, cpre)
    t0 = time.perf_counter()
    table = strategy_mod.simplify(result.strategy) if simplify else result.strategy
    t_simplify = time.perf_counter() - t0
    times = {
        "parse": 0.0,
        "encode": t_encode,
        "solve": result.stats.times.get("solve", 0.0),
        "simplify": t_simplify,
    }
    return SolvedGame(ParseReport(game), transformed, result, table, times)


def render_verdict(solved: SolvedGame) -> str:
    """The deterministic solve report: verdict, winning cells, strategy."""
    game = solved.transformed
    lines = ["WINNING: " + ("yes" if solved.winning else "no")]
    lines.extend(
        cell.render(game.locations) for cell in solved.result.winning.elements
    )
    text = solved.table.render(game)
    if text:
        lines.append(text)
    return "\n".join(lines) + "\n"
