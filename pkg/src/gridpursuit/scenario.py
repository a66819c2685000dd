"""Scenario files: one JSON object that poses a complete game.

A scenario bundles an arena (inline, as an ASCII map, or by reference to
another file), the team rosters, and the rules in force.  Enum-valued
fields are matched loosely ("ClassicPursuit", "classic-pursuit", and
"classic_pursuit" all name the same variant) but always written back in
the canonical snake_case form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .arena import Arena, Coord, arena_from_json, load_arena_file, parse_arena
from .belief import InfoMode
from .errors import ScenarioError
from .game import GameConfig, GameState, MoveRule, Team, Variant, initial_state
from .graph import GameGraph, build_game_graph

# variants where the robbers carry the objective
_ROBBER_SIDE = (Variant.CLASSIC_PURSUIT, Variant.SAFE_ZONE_LIVENESS)


def _norm(value: str) -> str:
    return value.replace("_", "").replace("-", "").lower()


def _lookup(enum_cls: type[Enum], value, what: str):
    if isinstance(value, enum_cls):
        return value
    key = _norm(str(value))
    for member in enum_cls:
        if _norm(member.value) == key or _norm(member.name) == key:
            return member
    options = ", ".join(m.value for m in enum_cls)
    raise ScenarioError(f"unknown {what} {value!r} (expected one of: {options})")


def _coords(raw, what: str) -> tuple[Coord, ...]:
    try:
        return tuple(Coord(int(p[0]), int(p[1])) for p in raw)
    except (TypeError, ValueError, IndexError):
        raise ScenarioError(f"{what} must be a list of [x, y] pairs, got {raw!r}")


@dataclass(frozen=True)
class Scenario:
    arena: Arena
    cfg: GameConfig
    cops: tuple[Coord, ...]
    robbers: tuple[Coord, ...]

    def initial(self) -> GameState:
        return initial_state(self.arena, self.cfg, self.cops, self.robbers)

    def build(self, backend: str | None = None) -> GameGraph:
        mode = self.cfg.info_mode
        if mode is not None and getattr(mode, "limited", False):
            from .belief import KnowledgeGameSpec, build_knowledge_game

            spec = KnowledgeGameSpec(
                cfg=self.cfg,
                obs_radius=mode.obs_radius,
                belief_cap=mode.belief_cap,
            )
            return build_knowledge_game(self.arena, spec, self.initial())
        return build_game_graph(self.arena, self.cfg, self.initial(), backend=backend)

    def to_json(self) -> dict:
        out = {
            "arena": self.arena.to_json(),
            "cops": [list(c) for c in self.cops],
            "robbers": [list(r) for r in self.robbers],
            "variant": self.cfg.variant.value,
            "moveRule": self.cfg.move_rule.value,
            "systemTeam": self.cfg.system_team.value,
        }
        mode = self.cfg.info_mode
        if mode is not None:
            out["infoMode"] = mode.to_json()
        if self.cfg.first_mover != "environment":
            out["first"] = self.cfg.first_mover
        return out

    @classmethod
    def from_json(cls, data: dict, base_dir: str | Path | None = None) -> "Scenario":
        if not isinstance(data, dict):
            raise ScenarioError("scenario must be a JSON object")
        if ("arena" in data) == ("arenaRef" in data):
            raise ScenarioError("scenario needs exactly one of arena or arenaRef")

        embedded_cops: tuple[Coord, ...] = ()
        embedded_robbers: tuple[Coord, ...] = ()
        if "arenaRef" in data:
            ref = Path(data["arenaRef"])
            if not ref.is_absolute():
                ref = Path(base_dir or ".") / ref
            arena, embedded_cops, embedded_robbers = load_arena_file(ref)
        else:
            raw = data["arena"]
            if isinstance(raw, str):
                arena, embedded_cops, embedded_robbers = parse_arena(raw)
            elif isinstance(raw, dict):
                arena, embedded_cops, embedded_robbers = arena_from_json(raw)
            else:
                raise ScenarioError("arena must be an ASCII map string or a JSON object")

        cops = _coords(data["cops"], "cops") if "cops" in data else embedded_cops
        robbers = (
            _coords(data["robbers"], "robbers") if "robbers" in data else embedded_robbers
        )
        if not cops:
            raise ScenarioError("no cop starts: give a cops list or mark them in the arena")
        if not robbers:
            raise ScenarioError(
                "no robber starts: give a robbers list or mark them in the arena"
            )

        if "variant" not in data:
            raise ScenarioError("scenario is missing the variant field")
        variant = _lookup(Variant, data["variant"], "variant")
        move_rule = (
            _lookup(MoveRule, data["moveRule"], "moveRule")
            if "moveRule" in data
            else MoveRule.MUST_MOVE
        )
        if "systemTeam" in data:
            system_team = _lookup(Team, data["systemTeam"], "systemTeam")
        else:
            system_team = Team.ROBBERS if variant in _ROBBER_SIDE else Team.COPS

        info_mode = None
        if data.get("infoMode") is not None:
            info_mode = InfoMode.from_json(data["infoMode"])
            if not info_mode.limited:
                info_mode = None  # explicit perfect is the same as absent

        first = data.get("first", "environment")
        if first not in ("environment", "system"):
            raise ScenarioError(f"first must be environment or system, got {first!r}")

        cfg = GameConfig(
            cop_count=len(cops),
            robber_count=len(robbers),
            system_team=system_team,
            variant=variant,
            move_rule=move_rule,
            info_mode=info_mode,
            state_cap=int(data.get("stateCap", 5_000_000)),
            first_mover=first,
        )
        return cls(arena=arena, cfg=cfg, cops=cops, robbers=robbers)


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario file; arenaRef paths resolve against its directory."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path} is not valid JSON: {e}")
    return Scenario.from_json(data, base_dir=path.parent)
