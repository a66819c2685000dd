"""Movement rules, turn structure, and capture for pursuit games.

Play alternates between the two teams; a team moves all of its members at
once (a joint move).  Cops may never stand on safe-zone cells and robbers
may never move onto an occupied cop cell; nobody enters walls.  A team
whose every joint move is illegal is stuck and loses the play.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from .arena import Arena, Coord, OPEN, WALL
from .errors import IllegalMoveError, ScenarioError
from .monitors import MONITOR_START, ObligationState, monitor_step


class Team(str, Enum):
    COPS = "cops"
    ROBBERS = "robbers"

    @property
    def opponent(self) -> "Team":
        return Team.ROBBERS if self == Team.COPS else Team.COPS


class MoveRule(str, Enum):
    MUST_MOVE = "must_move"
    ALLOW_STAY = "allow_stay"


class Variant(str, Enum):
    CLASSIC_PURSUIT = "classic_pursuit"      # robbers avoid capture forever
    SAFE_ZONE_LIVENESS = "safe_zone_liveness"  # robbers also shuttle between zones
    COP_PURSUIT = "cop_pursuit"              # cops force capture


@dataclass(frozen=True)
class GameConfig:
    cop_count: int
    robber_count: int
    system_team: Team
    variant: Variant
    move_rule: MoveRule = MoveRule.MUST_MOVE
    info_mode: object | None = None  # InfoMode from gridpursuit.belief, None = perfect
    state_cap: int = 5_000_000
    first_mover: str = "environment"  # or "system"

    def __post_init__(self):
        if self.cop_count < 1 or self.robber_count < 1:
            raise ScenarioError("each team needs at least one member")
        if self.variant == Variant.COP_PURSUIT and self.system_team != Team.COPS:
            raise ScenarioError("cop-pursuit puts the cops on the system side")
        if (
            self.variant in (Variant.CLASSIC_PURSUIT, Variant.SAFE_ZONE_LIVENESS)
            and self.system_team != Team.ROBBERS
        ):
            raise ScenarioError(f"{self.variant.value} puts the robbers on the system side")
        if self.first_mover not in ("environment", "system"):
            raise ScenarioError(f"first_mover must be environment or system, got {self.first_mover}")

    @property
    def environment_team(self) -> Team:
        return self.system_team.opponent

    @property
    def initial_turn(self) -> Team:
        return self.system_team if self.first_mover == "system" else self.environment_team

    def team_of(self, member_team: Team) -> str:
        return "system" if member_team == self.system_team else "environment"


@dataclass(frozen=True)
class GameState:
    cops: tuple[Coord, ...]
    robbers: tuple[Coord, ...]
    turn: Team
    monitors: tuple[ObligationState, ...] = ()

    def positions(self, team: Team) -> tuple[Coord, ...]:
        return self.cops if team == Team.COPS else self.robbers

    def to_json(self) -> dict:
        return {
            "cops": [list(c) for c in self.cops],
            "robbers": [list(r) for r in self.robbers],
            "turn": self.turn.value,
            "monitors": [m.to_json() for m in self.monitors],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GameState":
        return cls(
            cops=tuple(Coord(*c) for c in data["cops"]),
            robbers=tuple(Coord(*r) for r in data["robbers"]),
            turn=Team(data["turn"]),
            monitors=tuple(ObligationState.from_json(m) for m in data.get("monitors", ())),
        )


@dataclass(frozen=True)
class JointMove:
    team: Team
    destinations: tuple[Coord, ...]

    def sort_key(self) -> tuple:
        # lexicographic by (member index, destination y, destination x)
        return tuple((d[1], d[0]) for d in self.destinations)

    def to_json(self) -> dict:
        return {"team": self.team.value, "destinations": [list(d) for d in self.destinations]}

    @classmethod
    def from_json(cls, data: dict) -> "JointMove":
        return cls(Team(data["team"]), tuple(Coord(*d) for d in data["destinations"]))


def initial_state(arena: Arena, cfg: GameConfig, cops, robbers) -> GameState:
    from .arena import validate_starts

    cops = tuple(Coord(*c) for c in cops)
    robbers = tuple(Coord(*r) for r in robbers)
    if len(cops) != cfg.cop_count or len(robbers) != cfg.robber_count:
        raise ScenarioError(
            f"start lists ({len(cops)} cops, {len(robbers)} robbers) do not match "
            f"the configured team sizes ({cfg.cop_count}, {cfg.robber_count})"
        )
    validate_starts(arena, cops, robbers)
    if cfg.variant == Variant.SAFE_ZONE_LIVENESS and arena.zone_count < 2:
        raise ScenarioError(
            f"safe-zone play needs at least two zones, arena has {arena.zone_count}"
        )
    return GameState(
        cops=cops,
        robbers=robbers,
        turn=cfg.initial_turn,
        monitors=(MONITOR_START,) * cfg.robber_count,
    )


def member_destinations(
    arena: Arena, cfg: GameConfig, state: GameState, team: Team, src: Coord
) -> list[Coord]:
    """Cells one member may move to, ignoring interactions with teammates."""
    cells = list(arena.neighbors(src))
    if cfg.move_rule == MoveRule.ALLOW_STAY:
        cells.append(src)
        cells.sort(key=lambda c: (c[1], c[0]))
    if team == Team.COPS:
        return [c for c in cells if arena.kind_at(c) <= OPEN]
    cop_cells = set(state.cops)
    return [c for c in cells if c not in cop_cells]


def explain_illegal(
    arena: Arena, cfg: GameConfig, state: GameState, move: JointMove
) -> Optional[str]:
    """Clause name violated by ``move`` from ``state``, or None if legal."""
    team = move.team
    if team != state.turn:
        return "WrongTurn"
    srcs = state.positions(team)
    if len(move.destinations) != len(srcs):
        return "WrongArity"
    prefix = "Cops" if team == Team.COPS else "Robbers"
    cop_cells = set(state.cops)
    for src, dst in zip(srcs, move.destinations):
        if not arena.in_bounds(dst):
            return "CollideWithWall"
        kind = arena.kind_at(dst)
        if kind == WALL:
            return "CollideWithWall"
        if dst == src:
            if cfg.move_rule == MoveRule.MUST_MOVE:
                return "StayedPut"
        elif dst not in arena.neighbors(src):
            return "NotAdjacent"
        if team == Team.COPS and kind > 0:
            return "CopInSafeZone"
        if team == Team.ROBBERS and dst in cop_cells:
            return "RobberOntoCop"
    if len(set(move.destinations)) != len(move.destinations):
        return f"{prefix}Collide"
    for i in range(len(srcs)):
        for j in range(i + 1, len(srcs)):
            if move.destinations[i] == srcs[j] and move.destinations[j] == srcs[i]:
                return f"{prefix}Switch"
    return None


def legal_joint_moves(arena: Arena, cfg: GameConfig, state: GameState) -> list[JointMove]:
    """All legal joint moves of the team to move, in canonical order.

    Canonical order is lexicographic by (member index, destination y,
    destination x); strategy extraction's tie-breaking relies on it.
    An empty result means the team is stuck.
    """
    team = state.turn
    srcs = state.positions(team)
    cands = [member_destinations(arena, cfg, state, team, src) for src in srcs]
    moves = []
    for dests in itertools.product(*cands):
        if len(set(dests)) != len(dests):
            continue
        swap = False
        for i in range(len(srcs)):
            for j in range(i + 1, len(srcs)):
                if dests[i] == srcs[j] and dests[j] == srcs[i]:
                    swap = True
                    break
            if swap:
                break
        if swap:
            continue
        moves.append(JointMove(team, tuple(dests)))
    return moves


def apply_joint_move(
    arena: Arena, cfg: GameConfig, state: GameState, move: JointMove
) -> GameState:
    """Successor state after a legal joint move; raises IllegalMoveError."""
    clause = explain_illegal(arena, cfg, state, move)
    if clause is not None:
        raise IllegalMoveError(clause)
    if move.team == Team.COPS:
        return GameState(
            cops=move.destinations,
            robbers=state.robbers,
            turn=Team.ROBBERS,
            monitors=state.monitors,
        )
    monitors = state.monitors
    if cfg.variant == Variant.SAFE_ZONE_LIVENESS:
        monitors = tuple(
            monitor_step(m, max(arena.kind_at(d), 0), arena.zone_count).state
            for m, d in zip(state.monitors, move.destinations)
        )
    return GameState(
        cops=state.cops, robbers=move.destinations, turn=Team.COPS, monitors=monitors
    )


def is_capture(arena: Arena, state: GameState) -> bool:
    """A cop shares a cell with a robber (safe-zone cells grant immunity)."""
    cop_cells = set(state.cops)
    return any(r in cop_cells and arena.kind_at(r) <= OPEN for r in state.robbers)


def has_violation(state: GameState) -> bool:
    return any(m.violated is not None for m in state.monitors)
