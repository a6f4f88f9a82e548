import random

import pytest

from alpaga.antichain import Cell
from alpaga.play import (
    LOST,
    RANDOM,
    RUNNING,
    WON,
    IllegalState,
    IncompatibleObservation,
    new_session,
    proposed_move,
    step,
)
from alpaga.pipeline import solve_game
from alpaga.solver import make_cpre, solve_parity, transform_objective
from alpaga.strategy import NoCoveringTriple, StrategyTable, Triple, verify_strategy
from alpaga.testkit import GeneratorConfig, generate_game, sample_objective

from conftest import EXAMPLE_WIN


def solved_example_win():
    from alpaga.game import parse_game

    return solve_game(parse_game(EXAMPLE_WIN).game)


class TestNewSession:
    def test_initial_knowledge(self, example_win_game):
        solved = solved_example_win()
        sess = new_session(solved.transformed, solved.table)
        assert sess.knowledge.indices() == [0]
        assert sess.status == RUNNING

    def test_immediately_won_when_initial_in_target(self, example_game):
        from dataclasses import replace

        g = replace(example_game, target=frozenset({0, 1, 2}))
        solved = solve_game(g)
        sess = new_session(solved.transformed, solved.table)
        assert sess.status == WON

    def test_uncovered_initial_is_lost(self, example_win_game):
        tg = transform_objective(example_win_game)
        sess = new_session(tg, StrategyTable((), tg.width))
        assert sess.status == LOST


class TestProposedMove:
    def test_example_start(self):
        solved = solved_example_win()
        sess = new_session(solved.transformed, solved.table)
        action, compatible = proposed_move(sess)
        assert solved.transformed.actions[action] == "a"
        assert compatible == [0, 1]

    def test_from_third_state(self):
        solved = solved_example_win()
        tg = solved.transformed
        sess = new_session(tg, solved.table)
        sess.knowledge = Cell.from_indices([2], tg.width)
        action, compatible = proposed_move(sess)
        assert compatible == [2]

    def test_illegal_after_end(self):
        solved = solved_example_win()
        tg = solved.transformed
        sess = new_session(tg, solved.table)
        sess.status = LOST
        with pytest.raises(IllegalState):
            proposed_move(sess)

    def test_uncovered_marks_lost(self):
        solved = solved_example_win()
        tg = solved.transformed
        sess = new_session(tg, StrategyTable(solved.table.triples[:1], tg.width))
        sess.knowledge = Cell.from_indices([2], tg.width)
        with pytest.raises(NoCoveringTriple):
            proposed_move(sess)
        assert sess.status == LOST


class TestStep:
    def test_observation_moves_knowledge(self):
        solved = solved_example_win()
        sess = new_session(solved.transformed, solved.table)
        step(sess, "o2")
        assert sess.knowledge.indices() == [1]
        assert len(sess.history) == 1
        assert sess.history[0].observation == "o2"

    def test_incompatible_observation(self):
        solved = solved_example_win()
        sess = new_session(solved.transformed, solved.table)
        with pytest.raises(IncompatibleObservation):
            step(sess, "o3")
        assert sess.knowledge.indices() == [0]
        assert sess.history == []

    def test_random_single_choice_deterministic(self):
        solved = solved_example_win()
        tg = solved.transformed
        sess = new_session(tg, solved.table)
        sess.knowledge = Cell.from_indices([1], tg.width)
        step(sess, RANDOM)
        assert sess.knowledge.bits == 1 << tg.win_index
        assert sess.status == WON

    def test_seeded_runs_replay_identically(self):
        solved = solved_example_win()
        for seed in (0, 7, 99):
            runs = []
            for _ in range(2):
                sess = new_session(solved.transformed, solved.table, seed=seed)
                trace = []
                while sess.status == RUNNING and len(trace) < 12:
                    step(sess, RANDOM)
                    trace.append((sess.knowledge.bits, sess.status))
                runs.append(trace)
            assert runs[0] == runs[1]

    def test_history_chains_by_knowledge_update(self):
        solved = solved_example_win()
        tg = solved.transformed
        rng = random.Random(3)
        sess = new_session(tg, solved.table, seed=5)
        previous = sess.knowledge
        for _ in range(8):
            if sess.status != RUNNING:
                break
            action, _ = proposed_move(sess)
            step(sess, RANDOM)
            obs = [
                o for o in range(len(tg.observations))
                if tg.observations[o].id == sess.history[-1].observation
            ][0]
            assert sess.knowledge.bits == tg.knowledge_update(
                previous, action, obs
            ).bits
            previous = sess.knowledge


class TestRollouts:
    def test_verified_strategies_never_lose(self):
        rng = random.Random(71)
        rolled = 0
        for _ in range(250):
            g = generate_game(
                GeneratorConfig(
                    seed=rng.randrange(10**9),
                    n=rng.randint(1, 5),
                    num_actions=rng.randint(1, 3),
                    num_observations=rng.randint(1, 3),
                    max_priority=rng.randint(0, 3),
                    density=rng.choice([0.3, 0.6]),
                )
            )
            tg = transform_objective(sample_objective(g, rng))
            cpre, _ = make_cpre(tg, "enumerative")
            res = solve_parity(tg, cpre)
            if not res.initial_winning:
                continue
            assert verify_strategy(tg, res.strategy, tg.initial_cell())
            cells = 1 << tg.width
            horizon = 2 * cells
            for k in range(10):
                sess = new_session(tg, res.strategy, seed=k)
                seen = []
                while sess.status == RUNNING and len(seen) < horizon:
                    step(sess, RANDOM)
                    seen.append(sess.knowledge.bits)
                assert sess.status != LOST
                if sess.status == RUNNING:
                    # the tail of the rollout cycles; its minimum priority is even
                    tail = seen[len(seen) // 2 :]
                    prios = []
                    for bits in tail:
                        obs = tg.obs_of[(bits & -bits).bit_length() - 1]
                        prios.append(tg.observations[obs].priority)
                    assert min(prios) % 2 == 0
                rolled += 1
        assert rolled >= 1000
