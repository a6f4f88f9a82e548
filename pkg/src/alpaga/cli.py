"""Command-line front end.

    alpaga [solve] [options] FILE     solve a game file
    alpaga oracle FILE                explicit-construction verdict
    alpaga gen --seed N [...]         print a random game
    alpaga serve [--host H --port P]  run the HTTP service

Solving prints the verdict, the maximal winning cells (one per line)
and the simplified strategy; see the option list for the short flags
mirroring the historical tool surface.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import play
from .game import GameError, parse_game, render
from .pipeline import render_verdict, solve_text
from .solver import transform_objective
from .testkit import GeneratorConfig, generate_game, oracle_solve

EXIT_OK = 0
EXIT_LOSING = 1
EXIT_INPUT_ERROR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alpaga",
        description="solver for parity games with imperfect information",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a game file")
    solve.add_argument("file", help="game description file")
    solve.add_argument(
        "-i", "--interactive", action="store_true",
        help="play against the computed strategy after solving",
    )
    solve.add_argument(
        "-e", "--enumerative", action="store_true",
        help="use the enumerative controllable predecessor",
    )
    solve.add_argument(
        "-n", "--no-totalization", action="store_true",
        help="reject files whose transition relation is not total",
    )
    solve.add_argument(
        "-r", "--debug", action="store_true",
        help="internal traces and stack traces on errors",
    )
    solve.add_argument(
        "-s", "--no-simplification", action="store_true",
        help="print the strategy without simplification",
    )
    solve.add_argument(
        "-t", "--times", action="store_true", help="print phase timings"
    )
    solve.add_argument(
        "-v", "--warnings", action="store_true",
        help="print totalization warnings",
    )
    solve.add_argument(
        "--seed", type=int, default=0, help="seed for the interactive session"
    )
    solve.add_argument(
        "--x-first", action="store_true", help=argparse.SUPPRESS
    )
    solve.add_argument("--dot", metavar="FILE", help=argparse.SUPPRESS)

    oracle = sub.add_parser("oracle", help="explicit-construction verdict")
    oracle.add_argument("file")
    oracle.add_argument("-n", "--no-totalization", action="store_true")

    gen = sub.add_parser("gen", help="print a reproducible random game")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--n", type=int, default=4, help="number of locations")
    gen.add_argument("--actions", type=int, default=2)
    gen.add_argument("--observations", type=int, default=2)
    gen.add_argument("--max-priority", type=int, default=1)
    gen.add_argument("--density", type=float, default=0.3)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in ("solve", "oracle", "gen", "serve", "-h", "--help"):
        argv.insert(0, "solve")
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        if args.command == "gen":
            return _cmd_gen(args)
        return _cmd_serve(args)
    except GameError as exc:
        if getattr(args, "debug", False):
            raise
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _cmd_solve(args) -> int:
    if args.debug:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr)
    solved = solve_text(
        _read(args.file),
        totalize=not args.no_totalization,
        cpre_kind="enumerative" if args.enumerative else "symbolic",
        simplify=not args.no_simplification,
        x_first=args.x_first,
    )
    if args.warnings:
        for line in solved.report.warnings:
            print(f"warning: {line}", file=sys.stderr)
    sys.stdout.write(render_verdict(solved))
    if args.times:
        for phase in ("parse", "encode", "solve", "simplify"):
            print(f"time {phase}: {solved.times[phase]:.3f}s")
    if args.dot:
        _dump_dot(solved, args.dot)
    if args.interactive:
        repl(solved, seed=args.seed)
    return EXIT_OK if solved.winning else EXIT_LOSING


def _dump_dot(solved, path: str) -> None:
    from .cpre import _cp_diagram, build_symbolic_context
    ctx = build_symbolic_context(solved.transformed)
    diagram = _cp_diagram(ctx, solved.result.winning, primed=False)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(ctx.man.to_dot(diagram))


def _cmd_oracle(args) -> int:
    game = parse_game(_read(args.file), totalize=not args.no_totalization).game
    winning = oracle_solve(transform_objective(game))
    print("winning" if winning else "losing")
    return EXIT_OK if winning else EXIT_LOSING


def _cmd_gen(args) -> int:
    cfg = GeneratorConfig(
        seed=args.seed,
        n=args.n,
        num_actions=args.actions,
        num_observations=args.observations,
        max_priority=args.max_priority,
        density=args.density,
    )
    sys.stdout.write(render(generate_game(cfg)))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import os

    import uvicorn

    from .service import create_app

    addr = os.environ.get("ALPAGA_ADDR", "127.0.0.1:8000")
    host, _, port = addr.partition(":")
    uvicorn.run(
        create_app(),
        host=args.host or host or "127.0.0.1",
        port=args.port or int(port or 8000),
    )
    return EXIT_OK


HELP_TEXT = """commands:
  go        show knowledge, the move played, and compatible observations
  NUMBER    pick the observation with that listing number
  random    let the session pick a compatible observation
  history   show the rounds played so far
  quit      leave the interactive player
"""


def repl(solved, seed: int = 0, stdin=None, stdout=None) -> int:
    """Interactive strategy player; the user plays the adversary."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout

    def say(text: str) -> None:
        print(text, file=stdout)

    game = solved.transformed
    if not solved.winning:
        say("the initial cell is losing; nothing to play")
        return EXIT_OK
    sess = play.new_session(game, solved.table, seed=seed)
    say(f"interactive strategy player (session seed {seed}); type help for commands")

    def show_state() -> list[int]:
        say("knowledge: " + sess.knowledge.render(game.locations))
        action, compatible = play.proposed_move(sess)
        say(f"strategy plays: {game.actions[action]}")
        for num, o in enumerate(compatible, start=1):
            say(f"  {num}) {game.observations[o].id}")
        return compatible

    for raw in stdin:
        cmd = raw.strip().lower()
        if not cmd:
            continue
        if cmd == "quit":
            break
        if cmd == "help":
            say(HELP_TEXT.rstrip())
        elif cmd == "go":
            show_state()
        elif cmd == "history":
            if not sess.history:
                say("no rounds played yet")
            for k, entry in enumerate(sess.history, start=1):
                say(
                    f"{k}. played {entry.action}, saw {entry.observation}, "
                    "knowledge {" + ",".join(entry.cell) + "}"
                )
        elif cmd == "random" or cmd.isdigit():
            _, compatible = play.proposed_move(sess)
            if cmd == "random":
                play.step(sess, play.RANDOM)
            else:
                num = int(cmd)
                if not 1 <= num <= len(compatible):
                    say(f"no observation numbered {num}; type go to list them")
                    continue
                play.step(sess, game.observations[compatible[num - 1]].id)
            say("knowledge: " + sess.knowledge.render(game.locations))
            if sess.status != play.RUNNING:
                say(f"session over: {sess.status}")
                break
        else:
            say(f"unknown command {cmd!r}; type help for commands")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
