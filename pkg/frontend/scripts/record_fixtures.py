"""Record API responses as JSON fixtures for the front-end contract tests.

Run from the repository root:

    python3 frontend/scripts/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from alpaga.service import Store, create_app

REPO = Path(__file__).resolve().parent.parent.parent
OUT = REPO / "frontend" / "test" / "fixtures"


def dump(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print("wrote", name)


def main() -> None:
    client = TestClient(create_app(Store()))

    losing_text = (REPO / "games" / "example.game").read_text(encoding="utf-8")
    winning_text = (REPO / "games" / "example_win.game").read_text(encoding="utf-8")

    game = client.post("/games", content=losing_text).json()
    dump("losing_game.json", game)
    dump("losing_solve.json", client.post(f"/games/{game['id']}/solve").json())
    dump(
        "losing_session_conflict.json",
        {
            "status": 409,
            "body": client.post(f"/games/{game['id']}/sessions").json(),
        },
    )

    game2 = client.post("/games", content=winning_text).json()
    dump("winning_game.json", game2)
    dump("winning_solve.json", client.post(f"/games/{game2['id']}/solve").json())
    session = client.post(f"/games/{game2['id']}/sessions").json()
    dump("winning_session.json", session)
    sid = session["id"]

    steps = []
    for obs in ("o1", "o1", "o2"):
        steps.append(
            client.post(f"/sessions/{sid}/step", json={"observation": obs}).json()
        )
    dump("winning_steps_o1_o1_o2.json", steps)

    bad = client.post(f"/sessions/{sid}/step", json={"observation": "o1"})
    dump("incompatible_step.json", {"status": bad.status_code, "body": bad.json()})
    dump(
        "session_after_incompatible.json",
        client.get(f"/sessions/{sid}").json(),
    )

    parse_error = client.post("/games", content="ALPHABET : a\nSTATES broken\n")
    dump(
        "parse_error.json",
        {"status": parse_error.status_code, "body": parse_error.json()},
    )


if __name__ == "__main__":
    main()
