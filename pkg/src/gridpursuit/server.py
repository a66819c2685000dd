"""HTTP play sessions: a human plays one team against the controller.

Sessions live in memory.  Requests to one session are serialized by a
per-session lock; distinct sessions proceed concurrently.  The controller
side uses the synthesized strategy when it plays the system team and wins;
a human on the system side faces an optimal adversary instead.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .arena import Coord
from .belief import track_beliefs
from .errors import ArenaError, CapExceededError, ScenarioError
from .game import (
    GameConfig,
    GameState,
    JointMove,
    Team,
    apply_joint_move,
    explain_illegal,
    has_violation,
    is_capture,
    legal_joint_moves,
)
from .graph import build_game_graph
from .scenario import Scenario
from .sim import (
    AdversaryPolicy,
    GreedyDistance,
    Optimal,
    knowledge_env_step,
    settle_reveals,
)
from .solver import Solution, solve


@dataclass
class Session:
    """One live game: ground truth plus the controller's bookkeeping."""

    id: str
    scenario: Scenario
    human_team: Team
    state: GameState
    solution: Solution
    knowledge: bool
    strategy: object | None  # controller's, when it plays the system team
    policy: AdversaryPolicy | None  # controller's, otherwise
    policy_solution: Solution | None  # the solve the policy consults, if any
    history: list[JointMove] = field(default_factory=list)
    rr: int = 0  # round-robin index fed to an Optimal policy
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def cfg(self) -> GameConfig:
        return self.scenario.cfg

    @property
    def arena(self):
        return self.scenario.arena


class NewSessionBody(BaseModel):
    scenario: dict
    humanTeam: str


class MoveBody(BaseModel):
    destinations: list[list[int]]


def _outcome(session: Session) -> str | None:
    s = session.state
    if is_capture(session.arena, s):
        return "capture"
    if has_violation(s):
        return "violation"
    if not legal_joint_moves(session.arena, session.cfg, s):
        return f"{s.turn.value}_stuck"
    return None


def _snapshot(session: Session, include_arena: bool = False) -> dict:
    cfg = session.cfg
    s = session.state
    over = _outcome(session)
    human_turn = over is None and s.turn == session.human_team
    legal = (
        [mv.to_json() for mv in legal_joint_moves(session.arena, cfg, s)]
        if human_turn
        else []
    )
    mode = cfg.info_mode
    out = {
        "id": session.id,
        "state": s.to_json(),
        "turn": None if over else ("human" if human_turn else "controller"),
        "humanTeam": session.human_team.value,
        "controllerTeam": session.human_team.opponent.value,
        "systemTeam": cfg.system_team.value,
        "verdict": session.solution.verdict.to_json(),
        "legalMoves": legal,
        "outcome": over,
        "moveCount": len(session.history),
        "infoMode": mode.to_json() if mode is not None else {"kind": "perfect"},
    }
    if include_arena:
        out["arena"] = session.arena.to_json()
    return out


def _advance_rr(session: Session) -> None:
    """Advance the adversary policy's round-robin index past the old state."""
    sol = session.policy_solution
    if sol is None:
        return
    k = sol.data.get("k", 1)
    memb = sol.data.get("memb")
    if k <= 1 or memb is None:
        return
    idx = sol.graph.index_of(session.state)
    if idx is not None and memb[session.rr][idx]:
        session.rr = (session.rr + 1) % k


def _apply(session: Session, mv: JointMove) -> None:
    """One legal move: rr bookkeeping, truth update, strategy memory."""
    _advance_rr(session)
    session.state = apply_joint_move(session.arena, session.cfg, session.state, mv)
    session.history.append(mv)


def create_app(debug: bool = False, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="gridpursuit")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.post("/sessions", status_code=201)
    def create_session(body: NewSessionBody) -> dict:
        try:
            human = Team(body.humanTeam)
        except ValueError:
            raise HTTPException(422, f"unknown team {body.humanTeam!r}")
        try:
            sc = Scenario.from_json(body.scenario)
            graph = sc.build()
            sol = solve(graph)
        except (ScenarioError, ArenaError) as e:
            raise HTTPException(422, str(e))
        except CapExceededError as e:
            raise HTTPException(422, str(e))
        knowledge = graph.meta.get("backend") == "knowledge"
        controller = human.opponent
        strategy = policy = policy_solution = None
        if controller == sc.cfg.system_team:
            if sol.strategy is not None:
                strategy = sol.strategy
                strategy.reset()
            else:
                policy = GreedyDistance()  # no winning controller; play on gamely
        elif knowledge:
            # the environment is omniscient: consult the perfect-information
            # game, not the knowledge game the limited human is stuck with
            perfect = solve(build_game_graph(sc.arena, sc.cfg, sc.initial()))
            policy = Optimal(perfect)
            policy_solution = perfect
        else:
            policy = Optimal(sol)
            policy_solution = sol
        session = Session(
            id=uuid.uuid4().hex[:12],
            scenario=sc,
            human_team=human,
            state=sc.initial(),
            solution=sol,
            knowledge=knowledge,
            strategy=strategy,
            policy=policy,
            policy_solution=policy_solution,
        )
        with registry_lock:
            sessions[session.id] = session
        return _snapshot(session, include_arena=True)

    @app.get("/sessions/{session_id}")
    def read_session(session_id: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            return _snapshot(session, include_arena=True)

    @app.post("/sessions/{session_id}/move")
    def human_move(session_id: str, body: MoveBody) -> dict:
        session = get_session(session_id)
        with session.lock:
            if _outcome(session) is not None:
                raise HTTPException(409, "the game is over")
            if session.state.turn != session.human_team:
                raise HTTPException(409, "not the human's turn")
            mv = JointMove(
                session.human_team,
                tuple(Coord(int(d[0]), int(d[1])) for d in body.destinations),
            )
            clause = explain_illegal(session.arena, session.cfg, session.state, mv)
            if clause is not None:
                raise HTTPException(422, clause)
            _apply(session, mv)
            if session.strategy is not None:
                # human plays the environment; keep the controller in step
                if session.knowledge:
                    knowledge_env_step(session.strategy, session.state)
                else:
                    session.strategy.observe_env(mv.destinations)
            return _snapshot(session)

    @app.post("/sessions/{session_id}/auto")
    def controller_move(session_id: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            if _outcome(session) is not None:
                raise HTTPException(409, "the game is over")
            if session.state.turn == session.human_team:
                raise HTTPException(409, "it is the human's turn")
            if session.strategy is not None:
                if session.knowledge:
                    settle_reveals(session.strategy, session.state)
                mv = session.strategy.next_move()
                _apply(session, mv)
                if session.knowledge:
                    settle_reveals(session.strategy, session.state)
            else:
                mv = session.policy.joint_move(
                    session.arena, session.cfg, session.state, rr=session.rr
                )
                _apply(session, mv)
            return _snapshot(session)

    @app.get("/sessions/{session_id}/belief")
    def read_belief(session_id: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            mode = session.cfg.info_mode
            if mode is None or not mode.limited:
                return {"available": False}
            team = session.cfg.system_team
            if session.strategy is not None and session.knowledge:
                # the controller's live node carries the exact belief
                node = session.solution.graph.state(session.strategy.current_state)
                placements = sorted(node.belief)
                walls: list = []
            else:
                states = [session.scenario.initial()]
                for mv in session.history:
                    states.append(
                        apply_joint_move(session.arena, session.cfg, states[-1], mv)
                    )
                last = track_beliefs(session.arena, session.cfg, states, team, mode)[-1]
                placements = sorted(last.opponent_belief)
                walls = sorted(last.known_walls)
            return {
                "available": True,
                "team": team.value,
                "placements": [[list(c) for c in p] for p in placements],
                "knownWalls": [list(c) for c in walls],
            }

    if debug:

        @app.get("/sessions/{session_id}/replay-check")
        def replay_check(session_id: str) -> dict:
            session = get_session(session_id)
            with session.lock:
                state = session.scenario.initial()
                for mv in session.history:
                    if explain_illegal(session.arena, session.cfg, state, mv):
                        return {"ok": False, "reason": "illegal move in history"}
                    state = apply_joint_move(session.arena, session.cfg, state, mv)
                return {"ok": state == session.state}

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
