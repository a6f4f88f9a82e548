import pytest
from fastapi.testclient import TestClient

from alpaga.service import Store, create_app

from conftest import EXAMPLE, EXAMPLE_WIN


@pytest.fixture
def client():
    return TestClient(create_app(Store()))


def upload(client, text, **params):
    return client.post("/games", content=text, params=params)


class TestGames:
    def test_create_parses_summary(self, client):
        r = upload(client, EXAMPLE)
        assert r.status_code == 201
        body = r.json()
        assert body["locations"] == ["1", "2", "3"]
        assert body["actions"] == ["a"]
        assert [o["priority"] for o in body["observations"]] == [1, 1, 0]
        assert body["warnings"] == []

    def test_totalization_warning_and_opt_out(self, client):
        partial = EXAMPLE.replace("2, 3, a\n", "")
        r = upload(client, partial)
        assert r.status_code == 201
        assert r.json()["warnings"] == ["added transition: 2, SINK, a"]
        r = upload(client, partial, totalize="false")
        assert r.status_code == 400
        assert "not total" in r.json()["message"]

    def test_parse_error_cites_line(self, client):
        r = upload(client, EXAMPLE.replace("2, 3, a", "2, 3"))
        assert r.status_code == 400
        assert r.json()["line"] == 9

    def test_oversize_body(self, client):
        r = upload(client, "#" + "x" * (1 << 20))
        assert r.status_code == 413

    def test_unknown_game(self, client):
        assert client.get("/games/deadbeef").status_code == 404


class TestSolve:
    def test_solve_losing_example(self, client):
        gid = upload(client, EXAMPLE).json()["id"]
        r = client.post(f"/games/{gid}/solve")
        assert r.status_code == 200
        body = r.json()
        assert body["winning"] is False
        assert ["2"] in body["maxWinningCells"]
        assert ["WIN"] in body["maxWinningCells"]
        assert all(
            set(t) == {"cell", "rank", "action"} for t in body["strategy"]
        )
        assert body["stats"]["cpreCalls"] > 0

    def test_result_cached_on_game(self, client):
        gid = upload(client, EXAMPLE).json()["id"]
        first = client.post(f"/games/{gid}/solve").json()
        again = client.post(f"/games/{gid}/solve").json()
        assert first == again
        polled = client.get(f"/games/{gid}").json()
        assert polled["solveStatus"] == "done"
        assert polled["result"]["winning"] is False

    def test_solve_unknown_game(self, client):
        assert client.post("/games/none/solve").status_code == 404

    def test_enumerative_matches_symbolic(self, client):
        gid1 = upload(client, EXAMPLE_WIN).json()["id"]
        gid2 = upload(client, EXAMPLE_WIN).json()["id"]
        sym = client.post(f"/games/{gid1}/solve", params={"cpre": "symbolic"}).json()
        enu = client.post(f"/games/{gid2}/solve", params={"cpre": "enumerative"}).json()
        assert sym["winning"] == enu["winning"]
        assert sym["maxWinningCells"] == enu["maxWinningCells"]

    def test_concurrent_solve_conflict(self, client):
        store = client.app.state.store
        gid = upload(client, EXAMPLE).json()["id"]
        stored = store.games[gid]
        stored.solving = True
        try:
            assert client.post(f"/games/{gid}/solve").status_code == 409
        finally:
            stored.solving = False

    def test_timeout_returns_poll_url(self, monkeypatch):
        import time

        import alpaga.service as service_mod

        real = service_mod.solve_game

        def slow(*args, **kwargs):
            time.sleep(0.2)
            return real(*args, **kwargs)

        monkeypatch.setenv("ALPAGA_SOLVE_TIMEOUT_MS", "1")
        monkeypatch.setattr(service_mod, "solve_game", slow)
        client = TestClient(create_app(Store()))
        gid = upload(client, EXAMPLE).json()["id"]
        r = client.post(f"/games/{gid}/solve")
        assert r.status_code == 202
        assert r.json()["poll"] == f"/games/{gid}"
        store = client.app.state.store
        store.executor.shutdown(wait=True)
        polled = client.get(f"/games/{gid}").json()
        assert polled["solveStatus"] == "done"
        assert polled["result"]["winning"] is False

    def test_matches_cli_shared_core(self, client):
        from alpaga.pipeline import render_verdict, solve_text

        gid = upload(client, EXAMPLE).json()["id"]
        api = client.post(f"/games/{gid}/solve").json()
        solved = solve_text(EXAMPLE)
        text = render_verdict(solved)
        api_cells = {"{" + ",".join(c) + "}" for c in api["maxWinningCells"]}
        text_cells = set(text.splitlines()[1 : 1 + len(api_cells)])
        assert api_cells == text_cells
        assert api["winning"] == solved.winning


class TestSessions:
    def solved_game(self, client, text=EXAMPLE_WIN):
        gid = upload(client, text).json()["id"]
        client.post(f"/games/{gid}/solve")
        return gid

    def test_create_on_losing_game_conflicts(self, client):
        gid = self.solved_game(client, EXAMPLE)
        assert client.post(f"/games/{gid}/sessions").status_code == 409

    def test_create_before_solving_conflicts(self, client):
        gid = upload(client, EXAMPLE_WIN).json()["id"]
        assert client.post(f"/games/{gid}/sessions").status_code == 409

    def test_lifecycle(self, client):
        gid = self.solved_game(client)
        r = client.post(f"/games/{gid}/sessions")
        assert r.status_code == 201
        body = r.json()
        assert body["knowledge"] == ["1"]
        assert body["action"] == "a"
        assert body["compatible"] == ["o1", "o2"]
        sid = body["id"]

        r = client.post(f"/sessions/{sid}/step", json={"observation": "o2"})
        assert r.status_code == 200
        assert r.json()["knowledge"] == ["2"]
        assert r.json()["history"][-1]["observation"] == "o2"

        r = client.post(f"/sessions/{sid}/step", json={"observation": "o3"})
        assert r.status_code == 422
        state = client.get(f"/sessions/{sid}").json()
        assert state["knowledge"] == ["2"]

        r = client.post(f"/sessions/{sid}/step", json={"random": True})
        assert r.json()["knowledge"] == ["WIN"]
        assert r.json()["status"] == "won"

        r = client.post(f"/sessions/{sid}/step", json={"random": True})
        assert r.status_code == 409

    def test_step_requires_body_choice(self, client):
        gid = self.solved_game(client)
        sid = client.post(f"/games/{gid}/sessions").json()["id"]
        r = client.post(f"/sessions/{sid}/step", json={})
        assert r.status_code == 422

    def test_unknown_session(self, client):
        assert client.get("/sessions/none").status_code == 404
        assert (
            client.post("/sessions/none/step", json={"random": True}).status_code
            == 404
        )

    def test_seeded_sessions_reproduce(self, client):
        gid = self.solved_game(client)
        traces = []
        for _ in range(2):
            sid = client.post(
                f"/games/{gid}/sessions", params={"seed": 11}
            ).json()["id"]
            trace = []
            for _ in range(6):
                r = client.post(f"/sessions/{sid}/step", json={"random": True})
                if r.status_code != 200:
                    break
                trace.append(tuple(r.json()["knowledge"]))
                if r.json()["status"] != "running":
                    break
            traces.append(trace)
        assert traces[0] == traces[1]


class TestPersistence:
    def test_sources_round_trip(self, tmp_path):
        store = Store(str(tmp_path))
        client = TestClient(create_app(store))
        gid = upload(client, EXAMPLE).json()["id"]
        assert (tmp_path / f"{gid}.game").read_text() == EXAMPLE
        reloaded = Store(str(tmp_path))
        assert gid in reloaded.games
        assert reloaded.games[gid].game.locations == ("1", "2", "3")


class TestIndex:
    def test_root_serves_notice_without_ui(self, client, tmp_path, monkeypatch):
        monkeypatch.setenv("ALPAGA_UI_DIR", str(tmp_path / "nope"))
        c = TestClient(create_app(Store()))
        r = c.get("/")
        assert r.status_code == 200
