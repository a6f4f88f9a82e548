"""JSON-over-HTTP service exposing parse, solve and session stepping.

State is held in memory behind per-entry locks; game sources are
optionally persisted as flat files under ALPAGA_DATA.  Long solves run
in a worker thread: the solve endpoint waits up to
ALPAGA_SOLVE_TIMEOUT_MS and then answers 202 with a polling URL.
"""

from __future__ import annotations

import os
import secrets
import threading
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse

from . import play
from .game import GameError, GameStructure, parse_game
from .pipeline import SolvedGame, solve_game
from .strategy import StrategyTable

MAX_BODY_BYTES = 1 << 20


@dataclass
class StoredGame:
    id: str
    source: str
    game: GameStructure
    warnings: list[str]
    solved: SolvedGame | None = None
    solving: bool = False
    error: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class StoredSession:
    id: str
    game_id: str
    session: play.Session
    lock: threading.Lock = field(default_factory=threading.Lock)


class Store:
    def __init__(self, data_dir: str | None = None):
        self.games: dict[str, StoredGame] = {}
        self.sessions: dict[str, StoredSession] = {}
        self.data_dir = Path(data_dir) if data_dir else None
        self.executor = ThreadPoolExecutor(max_workers=2)
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self.data_dir.glob("*.game")):
                try:
                    report = parse_game(path.read_text(encoding="utf-8"))
                except GameError:
                    continue
                gid = path.stem
                self.games[gid] = StoredGame(
                    gid, path.read_text(encoding="utf-8"), report.game,
                    list(report.warnings),
                )

    def add_game(self, source: str, totalize: bool) -> StoredGame:
        report = parse_game(source, totalize=totalize)
        gid = secrets.token_hex(16)
        stored = StoredGame(gid, source, report.game, list(report.warnings))
        self.games[gid] = stored
        if self.data_dir:
            (self.data_dir / f"{gid}.game").write_text(source, encoding="utf-8")
        return stored


def _game_summary(stored: StoredGame) -> dict:
    game = stored.game
    return {
        "id": stored.id,
        "locations": list(game.locations),
        "actions": list(game.actions),
        "initial": [game.locations[i] for i in game.initial],
        "observations": [
            {
                "id": obs.id,
                "members": [game.locations[i] for i in sorted(obs.members)],
                "priority": obs.priority,
            }
            for obs in game.observations
        ],
        "warnings": stored.warnings,
    }


def _cells(game: GameStructure, antichain) -> list[list[str]]:
    return [
        [game.locations[i] for i in cell.indices()] for cell in antichain.elements
    ]


def _strategy_json(game: GameStructure, table: StrategyTable) -> list[dict]:
    return [
        {
            "cell": [game.locations[i] for i in t.cell.indices()],
            "rank": t.rank,
            "action": game.actions[t.action],
        }
        for t in table.triples
    ]


def _solve_payload(stored: StoredGame) -> dict:
    solved = stored.solved
    assert solved is not None
    game = solved.transformed
    return {
        "winning": solved.winning,
        "maxWinningCells": _cells(game, solved.result.winning),
        "strategy": _strategy_json(game, solved.table),
        "stats": {
            "cpreCalls": solved.result.stats.cpre_calls,
            "bodyEvaluations": solved.result.stats.body_evaluations,
            "iterationsPerLevel": solved.result.stats.iterations_per_level,
            "times": solved.times,
        },
    }


def _session_payload(entry: StoredSession) -> dict:
    sess = entry.session
    game = sess.game
    out = {
        "id": entry.id,
        "gameId": entry.game_id,
        "knowledge": [game.locations[i] for i in sess.knowledge.indices()],
        "status": sess.status,
        "seed": sess.seed,
        "history": [
            {
                "action": h.action,
                "observation": h.observation,
                "knowledge": h.cell,
            }
            for h in sess.history
        ],
        "action": None,
        "compatible": [],
    }
    if sess.status == play.RUNNING:
        action, compatible = play.proposed_move(sess)
        out["action"] = game.actions[action]
        out["compatible"] = [game.observations[o].id for o in compatible]
    return out


def create_app(store: Store | None = None) -> FastAPI:
    app = FastAPI(title="alpaga", version="0.1.0")
    if store is None:
        store = Store(os.environ.get("ALPAGA_DATA"))
    app.state.store = store
    timeout_ms = int(os.environ.get("ALPAGA_SOLVE_TIMEOUT_MS", "30000"))

    @app.exception_handler(GameError)
    async def game_error(_request, exc: GameError):
        return JSONResponse(
            status_code=400, content={"line": exc.line, "message": exc.message}
        )

    @app.post("/games", status_code=201)
    async def create_game(request: Request, totalize: bool = Query(True)):
        body = await request.body()
        if len(body) > MAX_BODY_BYTES:
            return JSONResponse(
                status_code=413, content={"message": "game description too large"}
            )
        stored = store.add_game(body.decode("utf-8"), totalize)
        return _game_summary(stored)

    @app.get("/games/{gid}")
    async def get_game(gid: str):
        stored = store.games.get(gid)
        if stored is None:
            return JSONResponse(status_code=404, content={"message": "unknown game"})
        out = _game_summary(stored)
        out["solveStatus"] = (
            "running" if stored.solving
            else "done" if stored.solved is not None
            else "error" if stored.error
            else "pending"
        )
        if stored.solved is not None:
            out["result"] = _solve_payload(stored)
        if stored.error:
            out["error"] = stored.error
        return out

    @app.post("/games/{gid}/solve")
    async def solve(
        gid: str,
        cpre: str = Query("symbolic"),
        simplify: bool = Query(True),
    ):
        stored = store.games.get(gid)
        if stored is None:
            return JSONResponse(status_code=404, content={"message": "unknown game"})
        if cpre not in ("symbolic", "enumerative"):
            return JSONResponse(
                status_code=422, content={"message": f"unknown cpre {cpre!r}"}
            )
        with stored.lock:
            if stored.solving:
                return JSONResponse(
                    status_code=409,
                    content={"message": "a solve is already running"},
                )
            if stored.solved is not None:
                return _solve_payload(stored)
            stored.solving = True

        def work():
            try:
                solved = solve_game(stored.game, cpre_kind=cpre, simplify=simplify)
                with stored.lock:
                    stored.solved = solved
            except Exception as exc:  # capacity or internal failure
                with stored.lock:
                    stored.error = str(exc)
            finally:
                with stored.lock:
                    stored.solving = False

        future = store.executor.submit(work)
        try:
            future.result(timeout=timeout_ms / 1000.0)
        except (FutureTimeout, TimeoutError):
            return JSONResponse(
                status_code=202,
                content={"status": "running", "poll": f"/games/{gid}"},
            )
        if stored.error:
            return JSONResponse(status_code=500, content={"message": stored.error})
        return _solve_payload(stored)

    @app.post("/games/{gid}/sessions", status_code=201)
    async def create_session(gid: str, seed: int = Query(0)):
        stored = store.games.get(gid)
        if stored is None:
            return JSONResponse(status_code=404, content={"message": "unknown game"})
        if stored.solved is None:
            return JSONResponse(
                status_code=409, content={"message": "game is not solved yet"}
            )
        if not stored.solved.winning:
            return JSONResponse(
                status_code=409,
                content={"message": "the initial cell is losing; no session"},
            )
        sid = secrets.token_hex(16)
        sess = play.new_session(
            stored.solved.transformed, stored.solved.table, seed=seed
        )
        entry = StoredSession(sid, gid, sess)
        store.sessions[sid] = entry
        return _session_payload(entry)

    @app.post("/sessions/{sid}/step")
    async def step_session(sid: str, body: dict):
        entry = store.sessions.get(sid)
        if entry is None:
            return JSONResponse(
                status_code=404, content={"message": "unknown session"}
            )
        with entry.lock:
            if entry.session.status != play.RUNNING:
                return JSONResponse(
                    status_code=409,
                    content={"message": f"session is {entry.session.status}"},
                )
            try:
                if body.get("random"):
                    play.step(entry.session, play.RANDOM)
                else:
                    choice = body.get("observation")
                    if not isinstance(choice, str):
                        return JSONResponse(
                            status_code=422,
                            content={"message": "need an observation id or random"},
                        )
                    play.step(entry.session, choice)
            except play.IncompatibleObservation as exc:
                return JSONResponse(status_code=422, content={"message": str(exc)})
            return _session_payload(entry)

    @app.get("/sessions/{sid}")
    async def get_session(sid: str):
        entry = store.sessions.get(sid)
        if entry is None:
            return JSONResponse(
                status_code=404, content={"message": "unknown session"}
            )
        return _session_payload(entry)

    _mount_ui(app)
    return app


def _mount_ui(app: FastAPI) -> None:
    candidates = [os.environ.get("ALPAGA_UI_DIR")]
    here = Path(__file__).resolve()
    for base in (Path.cwd(), *here.parents):
        candidates.append(base / "frontend" / "dist")
    for cand in candidates:
        if cand and Path(cand).is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=str(cand), html=True), name="ui")
            return

    @app.get("/")
    async def index() -> Response:
        return Response(
            "alpaga service: POST /games, POST /games/{id}/solve, "
            "POST /games/{id}/sessions, POST /sessions/{id}/step\n",
            media_type="text/plain",
        )
