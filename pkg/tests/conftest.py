import random
from pathlib import Path

import pytest

from alpaga.antichain import Antichain, Cell
from alpaga.game import parse_game

REPO = Path(__file__).resolve().parent.parent
GAMES = REPO / "games"

# verdict lines collected by the acceptance suite, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)

EXAMPLE = (GAMES / "example.game").read_text(encoding="utf-8")
EXAMPLE_WIN = (GAMES / "example_win.game").read_text(encoding="utf-8")


@pytest.fixture
def example_game():
    return parse_game(EXAMPLE).game


@pytest.fixture
def example_win_game():
    return parse_game(EXAMPLE_WIN).game


def cell(indices, width):
    return Cell.from_indices(indices, width)


def chain(cells, width):
    return Antichain.of(cells, width)


def random_cells(rng: random.Random, width: int, count: int):
    return [Cell(rng.randrange(1, 1 << width), width) for _ in range(count)]


def brute_cpre(game, q):
    """Check the defining predicate on every subset of the location space."""
    n = game.width
    good = []
    for bits in range(1 << n):
        s = Cell(bits, n)
        for a in range(len(game.actions)):
            if all(
                game.knowledge_update(s, a, o).bits == 0
                or q.member(game.knowledge_update(s, a, o))
                for o in range(len(game.observations))
            ):
                good.append(s)
                break
    return Antichain.of(good, n)


def brute_member(cell, antichain):
    """Downward-closure membership by enumerating subsets of each element."""
    b = cell.bits
    for e in antichain.elements:
        sub = e.bits
        while True:
            if sub == b:
                return True
            if sub == 0:
                break
            sub = (sub - 1) & e.bits
    return False
