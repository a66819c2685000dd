"""Playouts: run a synthesized controller against adversary policies.

A playout alternates the controller's committed moves with an adversary
policy's replies, recording every state.  Deterministic adversaries make
state repetition meaningful, so those playouts stop at the first repeat
and mark the lasso; randomized ones run to a terminal or the step limit.
The receding-horizon driver lifts the same machinery to unbounded tiled
planes by solving one finite window at a time.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from pathlib import Path

from .arena import EIGHT_WAY, Arena, Coord, TilingSpec, extract_window, manhattan
from .errors import IllegalMoveError, MalformedTraceError, ScenarioError
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
from .solver import Solution, Strategy, Verdict, solve, spoiler_choice


# ---------------------------------------------------------------------------
# adversary policies


class AdversaryPolicy:
    """Picks the environment team's joint move, or None when stuck.

    ``stateless`` marks policies whose move depends only on the current
    state (and round-robin index); only against those does a repeated
    state imply a repeated future, so only those playouts lasso-detect.
    """

    stateless = True

    def reset(self) -> None:
        pass

    def joint_move(self, arena, cfg, state, rr: int = 0) -> JointMove | None:
        raise NotImplementedError


class RandomLegal(AdversaryPolicy):
    """Uniform choice among legal joint moves; reproducible from the seed."""

    stateless = False

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._rng = random.Random(seed)

    def reset(self) -> None:
        self._rng = random.Random(self.seed)

    def joint_move(self, arena, cfg, state, rr: int = 0) -> JointMove | None:
        moves = legal_joint_moves(arena, cfg, state)
        if not moves:
            return None
        return self._rng.choice(moves)


class GreedyDistance(AdversaryPolicy):
    """Cops close the nearest-opponent gap, robbers widen it.

    The score of a joint move is the smallest Manhattan distance between
    any mover and any opponent after the move; ties break lexicographic
    by destination list, matching the canonical move order.
    """

    def joint_move(self, arena, cfg, state, rr: int = 0) -> JointMove | None:
        moves = legal_joint_moves(arena, cfg, state)
        if not moves:
            return None
        team = state.turn
        opponents = state.positions(team.opponent)
        minimize = team == Team.COPS

        def score(mv: JointMove) -> int:
            return min(manhattan(d, o) for d in mv.destinations for o in opponents)

        best = None
        best_key = None
        for mv in moves:
            key = (score(mv) if minimize else -score(mv), mv.sort_key())
            if best_key is None or key < best_key:
                best, best_key = mv, key
        return best


class Optimal(AdversaryPolicy):
    """Plays the environment side of a solved game as well as possible.

    Inside the environment's winning region this follows the spoiler
    construction and never lets the system off the hook; elsewhere every
    move loses, so it falls back to greedy pursuit to stay threatening.
    """

    def __init__(self, solution: Solution):
        self.solution = solution
        self._fallback = GreedyDistance()

    def joint_move(self, arena, cfg, state, rr: int = 0) -> JointMove | None:
        moves = legal_joint_moves(arena, cfg, state)
        if not moves:
            return None
        g = self.solution.graph
        idx = g.index_of(state)
        target = spoiler_choice(self.solution, idx, rr) if idx is not None else None
        if target is None:
            return self._fallback.joint_move(arena, cfg, state, rr)
        return g.edge_move(idx, target)


class Scripted(AdversaryPolicy):
    """Replays a fixed move list, then reports stuck."""

    stateless = False

    def __init__(self, moves):
        self.moves = list(moves)
        self._i = 0

    def reset(self) -> None:
        self._i = 0

    def joint_move(self, arena, cfg, state, rr: int = 0) -> JointMove | None:
        if self._i >= len(self.moves):
            return None
        mv = self.moves[self._i]
        self._i += 1
        clause = explain_illegal(arena, cfg, state, mv)
        if clause is not None:
            raise IllegalMoveError(clause)
        return mv


# ---------------------------------------------------------------------------
# traces


@dataclass
class Trace:
    """A recorded play: states plus the moves between them.

    ``states`` has one more entry than ``moves``.  ``cycle_start`` marks a
    lasso: the final state repeats ``states[cycle_start]`` and play would
    loop from there forever.
    """

    states: list[GameState]
    moves: list[JointMove]
    cycle_start: int | None = None

    def save(self, path) -> None:
        """One GameState per line; a final cycleStart line marks a lasso."""
        with open(path, "w") as fp:
            for s in self.states:
                fp.write(json.dumps(s.to_json()) + "\n")
            if self.cycle_start is not None:
                fp.write(json.dumps({"cycleStart": self.cycle_start}) + "\n")

    @classmethod
    def load(cls, path) -> "Trace":
        states: list[GameState] = []
        cycle_start = None
        with open(path) as fp:
            for lineno, line in enumerate(fp, start=1):
                line = line.strip()
                if not line:
                    continue
                if cycle_start is not None:
                    raise MalformedTraceError(
                        f"{path}:{lineno}: cycleStart must be the final line"
                    )
                try:
                    data = json.loads(line)
                except json.JSONDecodeError as e:
                    raise MalformedTraceError(f"{path}:{lineno}: {e}")
                if "cycleStart" in data:
                    cycle_start = int(data["cycleStart"])
                    continue
                try:
                    states.append(GameState.from_json(data))
                except (KeyError, TypeError, ValueError) as e:
                    raise MalformedTraceError(f"{path}:{lineno}: bad state: {e}")
        return cls(states=states, moves=_moves_between(states), cycle_start=cycle_start)


def _moves_between(states) -> list[JointMove]:
    """Reconstruct the joint moves a state sequence implies."""
    moves = []
    for a, b in zip(states, states[1:]):
        moves.append(JointMove(a.turn, b.positions(a.turn)))
    return moves


def summarize(arena: Arena, cfg: GameConfig, trace: Trace) -> dict:
    """Condense a trace into {outcome, steps, captures, zoneVisits}."""
    last = trace.states[-1]
    if is_capture(arena, last):
        outcome = "capture"
    elif has_violation(last):
        outcome = "violation"
    elif trace.cycle_start is not None:
        outcome = "lasso"
    elif not legal_joint_moves(arena, cfg, last):
        outcome = f"{last.turn.value}_stuck"
    else:
        outcome = "max_steps"
    visits: dict[str, int] = {}
    prev_zone = [0] * cfg.robber_count
    for s in trace.states:
        for r, pos in enumerate(s.robbers):
            z = max(arena.kind_at(pos), 0)
            if z > 0 and z != prev_zone[r]:
                key = f"r{r}z{z}"
                visits[key] = visits.get(key, 0) + 1
            prev_zone[r] = z
    return {
        "outcome": outcome,
        "steps": len(trace.moves),
        "captures": 1 if outcome == "capture" else 0,
        "zoneVisits": visits,
    }


# ---------------------------------------------------------------------------
# playouts


def run_playout(
    arena: Arena,
    cfg: GameConfig,
    strategy: Strategy,
    adv: AdversaryPolicy,
    max_steps: int = 10_000,
) -> Trace:
    """Play the controller against ``adv`` from the strategy's start state.

    Stops at capture, violation, a stuck team, ``max_steps``, or (against
    stateless adversaries) the first repeat of (state, round-robin index),
    which is recorded as the lasso point.  A controller emitting an
    illegal move raises IllegalMoveError; that is a soundness bug, not a
    game outcome.
    """
    if strategy.team != cfg.system_team:
        raise ScenarioError("strategy plays a different team than the scenario's system")
    strategy.reset()
    adv.reset()
    g = strategy.graph
    state = g.state(strategy.current_state)
    states = [state]
    moves: list[JointMove] = []
    cycle_start = None
    seen = {(state, strategy.current_rr): 0} if adv.stateless else None
    while len(moves) < max_steps:
        if is_capture(arena, state) or has_violation(state):
            break
        if not legal_joint_moves(arena, cfg, state):
            break
        if state.turn == cfg.system_team:
            mv = strategy.next_move()
        else:
            mv = adv.joint_move(arena, cfg, state, rr=strategy.current_rr)
            if mv is None:
                break
            strategy.observe_env(mv.destinations)
        state = apply_joint_move(arena, cfg, state, mv)
        moves.append(mv)
        states.append(state)
        if seen is not None:
            key = (state, strategy.current_rr)
            if key in seen:
                cycle_start = seen[key]
                break
            seen[key] = len(moves)
    return Trace(states=states, moves=moves, cycle_start=cycle_start)


# ---------------------------------------------------------------------------
# playouts against knowledge-game strategies


def _class_successor(strategy: Strategy, placement) -> int:
    """The successor class node whose belief holds the true placement.

    Knowledge-game environment branches are observation classes, not
    destination lists, so the true opponent placement picks the branch:
    classes partition the consistent placements, hence exactly one hit.
    """
    g = strategy.graph
    s = strategy.current_state
    placement = tuple(placement)
    for v in g.successors(s):
        if placement in g.state(int(v)).belief:
            return int(v)
    raise ScenarioError("true placement matches no knowledge class (soundness bug)")


def settle_reveals(strategy: Strategy, state: GameState) -> None:
    """Resolve pending reveal nodes by the true opponent placement.

    A system move that splits the belief parks the play on a reveal node;
    what the system then observes is decided by where the opponents really
    are, not by anyone's choice, so the runner advances through it here.
    """
    g = strategy.graph
    opp = g.cfg.system_team.opponent
    while getattr(g.state(strategy.current_state), "phase", "play") == "reveal":
        strategy.follow(_class_successor(strategy, state.positions(opp)))


def knowledge_env_step(strategy: Strategy, state: GameState) -> None:
    """Advance a knowledge strategy past the true environment move.

    ``state`` is the true state after the move; its opponent placement
    selects the observation class the play actually entered.
    """
    opp = strategy.graph.cfg.system_team.opponent
    strategy.follow(_class_successor(strategy, state.positions(opp)))


def knowledge_playout(
    arena: Arena,
    cfg: GameConfig,
    solution: Solution,
    init: GameState,
    adv: AdversaryPolicy,
    max_steps: int = 10_000,
) -> Trace:
    """Play a knowledge-game controller against ``adv`` on the true state.

    The controller only ever sees its own belief node; the adversary acts
    on ``init``'s ground truth, and each of its moves resolves which
    observation class the controller's play follows.  Stop conditions and
    lasso detection mirror :func:`run_playout`.
    """
    g = solution.graph
    if g.meta.get("backend") != "knowledge":
        raise ScenarioError("knowledge playouts need a knowledge-game solution")
    strategy = solution.strategy
    if strategy is None:
        raise ScenarioError("no winning controller to play")
    strategy.reset()
    adv.reset()
    state = init
    states = [state]
    moves: list[JointMove] = []
    cycle_start = None
    seen = (
        {(state, strategy.current_state, strategy.current_rr): 0}
        if adv.stateless
        else None
    )
    while len(moves) < max_steps:
        settle_reveals(strategy, state)
        if is_capture(arena, state) or has_violation(state):
            break
        if not legal_joint_moves(arena, cfg, state):
            break
        if state.turn == cfg.system_team:
            mv = strategy.next_move()
            state = apply_joint_move(arena, cfg, state, mv)
        else:
            mv = adv.joint_move(arena, cfg, state, rr=strategy.current_rr)
            if mv is None:
                break
            state = apply_joint_move(arena, cfg, state, mv)
            knowledge_env_step(strategy, state)
        moves.append(mv)
        states.append(state)
        if seen is not None:
            settle_reveals(strategy, state)
            key = (state, strategy.current_state, strategy.current_rr)
            if key in seen:
                cycle_start = seen[key]
                break
            seen[key] = len(moves)
    return Trace(states=states, moves=moves, cycle_start=cycle_start)


# ---------------------------------------------------------------------------
# receding horizon on tiled planes


@dataclass
class WindowRun:
    """One solved window of a receding-horizon play."""

    arena: Arena
    origin: Coord
    verdict: Verdict  # always window-relative
    start: int  # index into the global trace where this window took over
    states: list[GameState]  # window-relative slice, endpoints included


def _to_window(origin: Coord, pos: Coord) -> Coord:
    return Coord(pos[0] - origin.x, pos[1] - origin.y)


def _to_plane(origin: Coord, pos: Coord) -> Coord:
    return Coord(pos[0] + origin.x, pos[1] + origin.y)


def _window_state(origin: Coord, s: GameState) -> GameState:
    return GameState(
        cops=tuple(_to_window(origin, c) for c in s.cops),
        robbers=tuple(_to_window(origin, r) for r in s.robbers),
        turn=s.turn,
        monitors=s.monitors,
    )


def _plane_state(origin: Coord, s: GameState) -> GameState:
    return GameState(
        cops=tuple(_to_plane(origin, c) for c in s.cops),
        robbers=tuple(_to_plane(origin, r) for r in s.robbers),
        turn=s.turn,
        monitors=s.monitors,
    )


def receding_horizon_play(
    tiling: TilingSpec,
    cfg: GameConfig,
    window_size: int,
    replan_margin: int | None = None,
    max_steps: int = 1_000,
    *,
    cops,
    robbers,
    adversary: AdversaryPolicy | None = None,
    window_hook=None,
    connectivity: str = EIGHT_WAY,
    backend: str | None = None,
) -> tuple[Trace, list[WindowRun]]:
    """Play on the unbounded tiled plane, one solved window at a time.

    Each window is cut around the system team's centroid, solved, and
    played until any agent comes within ``replan_margin`` cells of the
    window boundary; then the window re-centers and re-solves.  Monitor
    state carries across windows.  ``cops`` and ``robbers`` are plane
    coordinates.  ``window_hook`` may rewrite each freshly cut window
    (e.g. stamping safe zones into it) before the solve.  When the system
    loses a window it keeps playing greedily; the adversary defaults to
    optimal play within the current window.  Verdicts are only ever
    claims about their window, never about the infinite game.
    """
    if replan_margin is None:
        mode = cfg.info_mode
        replan_margin = mode.obs_radius if mode is not None and mode.limited else 1
    if replan_margin < 1 or window_size < 2 * replan_margin + 3:
        raise ScenarioError(
            f"window size {window_size} cannot hold a replan margin of {replan_margin}"
        )
    from .monitors import MONITOR_START

    plane = GameState(
        cops=tuple(Coord(*c) for c in cops),
        robbers=tuple(Coord(*r) for r in robbers),
        turn=cfg.initial_turn,
        monitors=(MONITOR_START,) * cfg.robber_count,
    )
    trace_states = [plane]
    trace_moves: list[JointMove] = []
    windows: list[WindowRun] = []
    greedy = GreedyDistance()

    def margin_tripped(win_state: GameState, size: int) -> bool:
        for pos in win_state.cops + win_state.robbers:
            dist = min(pos.x, pos.y, size - 1 - pos.x, size - 1 - pos.y)
            if dist <= replan_margin:
                return True
        return False

    while len(trace_moves) < max_steps:
        own = plane.positions(cfg.system_team)
        center = Coord(
            round(sum(p.x for p in own) / len(own)),
            round(sum(p.y for p in own) / len(own)),
        )
        # a fleeing opponent can outrun a fixed window centered on the
        # system team; grow until everyone fits with margin to spare (the
        # state cap still bounds how far this can go)
        size = window_size
        while True:
            win_arena = extract_window(tiling, center, size, connectivity)
            if window_hook is not None:
                win_arena = window_hook(win_arena)
            origin = win_arena.origin
            state = _window_state(origin, plane)
            if not margin_tripped(state, size):
                break
            size += 2
        graph = build_game_graph(win_arena, cfg, state, backend=backend)
        sol = solve(graph)
        verdict = replace(sol.verdict, window_relative=True)
        run = WindowRun(
            arena=win_arena,
            origin=origin,
            verdict=verdict,
            start=len(trace_moves),
            states=[state],
        )
        windows.append(run)
        strategy = sol.strategy if verdict.winner == "system" else None
        if strategy is not None:
            strategy.reset()
        adv = adversary if adversary is not None else Optimal(sol)
        rr = 0
        k = sol.data.get("k", 1)
        memb = sol.data.get("memb")
        while len(trace_moves) < max_steps:
            if is_capture(win_arena, state) or has_violation(state):
                return Trace(trace_states, trace_moves), windows
            if not legal_joint_moves(win_arena, cfg, state):
                return Trace(trace_states, trace_moves), windows
            if state.turn == cfg.system_team:
                if strategy is not None:
                    mv = strategy.next_move()
                else:
                    mv = greedy.joint_move(win_arena, cfg, state, rr)
            else:
                mv = adv.joint_move(win_arena, cfg, state, rr=rr)
                if mv is None:
                    return Trace(trace_states, trace_moves), windows
                if strategy is not None:
                    strategy.observe_env(mv.destinations)
            if k > 1 and memb is not None:
                idx = graph.index_of(state)
                if idx is not None and memb[rr][idx]:
                    rr = (rr + 1) % k
            state = apply_joint_move(win_arena, cfg, state, mv)
            plane = _plane_state(origin, state)
            trace_moves.append(
                JointMove(mv.team, tuple(_to_plane(origin, d) for d in mv.destinations))
            )
            trace_states.append(plane)
            run.states.append(state)
            if margin_tripped(state, size):
                break
    return Trace(trace_states, trace_moves), windows
