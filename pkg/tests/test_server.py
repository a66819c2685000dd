"""HTTP play sessions: lifecycle, turn policing, belief overlays, replay checks."""

import pytest

fastapi = pytest.importorskip("fastapi")
from fastapi.testclient import TestClient

from gridpursuit.server import create_app

from conftest import PATH_MAP

PATH_SCENARIO = {"arena": PATH_MAP, "variant": "CopPursuit"}
CORRIDOR_ZI = {
    "arena": "C....R",
    "variant": "CopPursuit",
    "infoMode": {"kind": "zi", "obsRadius": 1},
}


@pytest.fixture
def client():
    return TestClient(create_app(debug=True))


@pytest.fixture
def plain_client():
    return TestClient(create_app())


def new_session(client, scenario, human):
    resp = client.post("/sessions", json={"scenario": scenario, "humanTeam": human})
    assert resp.status_code == 201
    return resp.json()


def play_out(client, snap, pick, limit=40):
    """Drive a session to its outcome, choosing human moves with pick."""
    sid = snap["id"]
    for _ in range(limit):
        if snap["outcome"] is not None:
            return snap
        if snap["turn"] == "controller":
            snap = client.post(f"/sessions/{sid}/auto").json()
        else:
            mv = pick(snap["legalMoves"])
            resp = client.post(
                f"/sessions/{sid}/move", json={"destinations": mv["destinations"]}
            )
            assert resp.status_code == 200
            snap = resp.json()
    raise AssertionError("session never finished")


def flee_right(moves):
    return max(moves, key=lambda m: m["destinations"][0][0])


# --- session lifecycle ---


def test_create_session_returns_full_snapshot(client):
    snap = new_session(client, PATH_SCENARIO, "robbers")
    assert snap["humanTeam"] == "robbers"
    assert snap["controllerTeam"] == "cops"
    assert snap["systemTeam"] == "cops"
    assert snap["verdict"]["winner"] == "system"
    assert snap["turn"] == "human"
    assert snap["moveCount"] == 0
    assert snap["outcome"] is None
    assert snap["arena"]["width"] == 3
    assert snap["infoMode"] == {"kind": "perfect"}
    # robber has exactly one legal move on the path
    assert [m["destinations"] for m in snap["legalMoves"]] == [[[1, 0]]]


def test_get_session_round_trips(client):
    snap = new_session(client, PATH_SCENARIO, "robbers")
    again = client.get(f"/sessions/{snap['id']}")
    assert again.status_code == 200
    assert again.json()["id"] == snap["id"]
    assert again.json()["state"] == snap["state"]


def test_unknown_session_is_404(client):
    assert client.get("/sessions/missing").status_code == 404
    assert client.post("/sessions/missing/auto").status_code == 404


def test_sessions_are_isolated(client):
    a = new_session(client, PATH_SCENARIO, "robbers")
    b = new_session(client, PATH_SCENARIO, "robbers")
    assert a["id"] != b["id"]
    client.post(f"/sessions/{a['id']}/move", json={"destinations": [[1, 0]]})
    assert client.get(f"/sessions/{b['id']}").json()["moveCount"] == 0


# --- turn policing ---


def test_out_of_turn_requests_are_409(client):
    snap = new_session(client, PATH_SCENARIO, "robbers")
    sid = snap["id"]
    # it is the human's turn: auto must refuse
    assert client.post(f"/sessions/{sid}/auto").status_code == 409
    client.post(f"/sessions/{sid}/move", json={"destinations": [[1, 0]]})
    # now the controller's: a human move must refuse
    resp = client.post(f"/sessions/{sid}/move", json={"destinations": [[2, 0]]})
    assert resp.status_code == 409


def test_finished_game_refuses_both(client):
    snap = new_session(client, PATH_SCENARIO, "robbers")
    snap = play_out(client, snap, pick=lambda moves: moves[0])
    assert snap["outcome"] == "capture"
    sid = snap["id"]
    assert client.post(f"/sessions/{sid}/move", json={"destinations": [[1, 0]]}).status_code == 409
    assert client.post(f"/sessions/{sid}/auto").status_code == 409


# --- move validation ---


def test_illegal_swap_reports_cops_switch(client):
    snap = new_session(
        client, {"arena": "CC.R", "variant": "CopPursuit"}, "cops"
    )
    sid = snap["id"]
    snap = client.post(f"/sessions/{sid}/auto").json()  # robber moves first
    assert snap["turn"] == "human"
    resp = client.post(
        f"/sessions/{sid}/move", json={"destinations": [[1, 0], [0, 0]]}
    )
    assert resp.status_code == 422
    assert resp.json()["detail"] == "CopsSwitch"


def test_illegal_jump_reports_not_adjacent(client):
    snap = new_session(client, PATH_SCENARIO, "robbers")
    resp = client.post(
        f"/sessions/{snap['id']}/move", json={"destinations": [[0, 0]]}
    )
    assert resp.status_code == 422
    assert resp.json()["detail"] == "NotAdjacent"


def test_bad_human_team_is_422(client):
    resp = client.post(
        "/sessions", json={"scenario": PATH_SCENARIO, "humanTeam": "referee"}
    )
    assert resp.status_code == 422


def test_bad_scenario_is_422(client):
    resp = client.post(
        "/sessions", json={"scenario": {"arena": "C.R"}, "humanTeam": "cops"}
    )
    assert resp.status_code == 422


# --- full games ---


def test_winning_controller_captures_fleeing_robber(client):
    snap = new_session(client, PATH_SCENARIO, "robbers")
    snap = play_out(client, snap, pick=flee_right)
    assert snap["outcome"] == "capture"
    assert snap["state"]["robbers"][0] in snap["state"]["cops"]
    # one cop move suffices once the robber is forced onto the middle cell
    assert snap["moveCount"] <= 4


def test_losing_controller_plays_on_gamely(client):
    # classic pursuit puts the robbers on the system side; they lose the
    # 5-path, so the controller falls back to a greedy policy and plays on
    snap = new_session(
        client, {"arena": "C...R", "variant": "ClassicPursuit"}, "cops"
    )
    assert snap["verdict"]["winner"] == "environment"
    assert snap["controllerTeam"] == "robbers"
    snap = play_out(client, snap, pick=flee_right)
    assert snap["outcome"] in ("capture", "robbers_stuck")
    assert snap["moveCount"] >= 3


def test_human_plays_system_against_optimal_adversary(client):
    snap = new_session(client, PATH_SCENARIO, "cops")
    assert snap["turn"] == "controller"
    snap = play_out(client, snap, pick=flee_right)
    assert snap["outcome"] == "capture"


# --- knowledge sessions ---


def test_knowledge_controller_corners_robber_and_tracks_belief(client):
    snap = new_session(client, CORRIDOR_ZI, "robbers")
    assert snap["infoMode"]["kind"] == "zi"
    sid = snap["id"]

    belief = client.get(f"/sessions/{sid}/belief").json()
    assert belief["available"] is True
    assert belief["team"] == "cops"
    # the cop sees nothing beyond its radius yet
    assert sorted(belief["placements"]) == [[[2, 0]], [[3, 0]], [[4, 0]], [[5, 0]]]

    for _ in range(40):
        if snap["outcome"] is not None:
            break
        if snap["turn"] == "controller":
            snap = client.post(f"/sessions/{sid}/auto").json()
        else:
            mv = flee_right(snap["legalMoves"])
            snap = client.post(
                f"/sessions/{sid}/move", json={"destinations": mv["destinations"]}
            ).json()
        belief = client.get(f"/sessions/{sid}/belief").json()
        if snap["outcome"] is None:
            # the true placement never drops out of the controller's belief
            assert snap["state"]["robbers"] in belief["placements"]
    assert snap["outcome"] == "robbers_stuck"
    assert snap["moveCount"] == 8


def test_knowledge_human_system_faces_omniscient_adversary(client):
    snap = new_session(client, CORRIDOR_ZI, "cops")
    sid = snap["id"]
    snap = play_out(client, snap, pick=flee_right)
    assert snap["outcome"] in ("capture", "robbers_stuck")
    belief = client.get(f"/sessions/{sid}/belief").json()
    assert belief["available"] is True
    assert belief["team"] == "cops"


def test_map_memory_session_reports_known_walls(client):
    scenario = {
        "arena": "C.#..R\n......",
        "variant": "CopPursuit",
        "infoMode": {"kind": "zi", "obsRadius": 1, "mapMemory": True},
    }
    snap = new_session(client, scenario, "cops")
    sid = snap["id"]
    for _ in range(6):
        if snap["outcome"] is not None:
            break
        if snap["turn"] == "controller":
            snap = client.post(f"/sessions/{sid}/auto").json()
        else:
            snap = client.post(
                f"/sessions/{sid}/move",
                json={"destinations": snap["legalMoves"][0]["destinations"]},
            ).json()
    belief = client.get(f"/sessions/{sid}/belief").json()
    assert belief["available"] is True
    assert [2, 0] in belief["knownWalls"]


def test_belief_unavailable_under_perfect_information(client):
    snap = new_session(client, PATH_SCENARIO, "robbers")
    belief = client.get(f"/sessions/{snap['id']}/belief").json()
    assert belief == {"available": False}


# --- replay check (debug builds only) ---


def test_replay_check_confirms_history(client):
    snap = new_session(client, PATH_SCENARIO, "robbers")
    sid = snap["id"]
    client.post(f"/sessions/{sid}/move", json={"destinations": [[1, 0]]})
    client.post(f"/sessions/{sid}/auto")
    assert client.get(f"/sessions/{sid}/replay-check").json() == {"ok": True}


def test_replay_check_absent_outside_debug(plain_client):
    snap = new_session(plain_client, PATH_SCENARIO, "robbers")
    resp = plain_client.get(f"/sessions/{snap['id']}/replay-check")
    assert resp.status_code == 404
