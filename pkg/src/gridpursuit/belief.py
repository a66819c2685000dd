"""Limited-visibility play: observations, belief tracking, knowledge games.

A team's view of the world is the union of Manhattan balls around its
members (zone cells are always known).  Beliefs are sets of possible
opponent position tuples; persistent mode pushes the previous belief
through one opponent move and filters by the new observation, amnesic
mode keeps only what the current observation alone supports.  The
knowledge game folds beliefs into a perfect-information graph the solver
consumes unchanged: the system tracks its own positions and monitors
exactly, the environment is omniscient, and capture or a broken promise
is declared only when every consistent configuration agrees on it.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .arena import Arena, Coord
from .errors import CapExceededError, ScenarioError
from .game import GameConfig, GameState, Team, Variant, legal_joint_moves
from .graph import (
    TERM_CAPTURE,
    TERM_COPS_STUCK,
    TERM_NONE,
    TERM_ROBBERS_STUCK,
    TERM_VIOLATION,
    GameGraph,
)
from .monitors import MONITOR_START, monitor_step


@dataclass(frozen=True)
class InfoMode:
    """What each side can see; ``perfect`` means the full state."""

    kind: str = "perfect"  # "perfect" | "zi"
    obs_radius: int = 1
    memory: str = "persistent"  # "persistent" | "amnesic"
    map_memory: bool = False
    info_sharing: int | None = None  # sharing radius, None = no sharing
    belief_cap: int = 10_000

    def __post_init__(self):
        if self.kind not in ("perfect", "zi"):
            raise ScenarioError(f"unknown info mode kind {self.kind!r}")
        if self.memory not in ("persistent", "amnesic"):
            raise ScenarioError(f"unknown memory mode {self.memory!r}")
        if self.kind == "zi" and self.obs_radius < 1:
            raise ScenarioError("obsRadius must be at least 1")

    @property
    def limited(self) -> bool:
        return self.kind == "zi"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "obsRadius": self.obs_radius,
            "memory": self.memory,
            "mapMemory": self.map_memory,
            "infoSharing": (
                {"radius": self.info_sharing} if self.info_sharing is not None else None
            ),
            "beliefCap": self.belief_cap,
        }

    @classmethod
    def from_json(cls, data: dict) -> "InfoMode":
        sharing = data.get("infoSharing")
        return cls(
            kind=data.get("kind", "perfect"),
            obs_radius=int(data.get("obsRadius", 1)),
            memory=data.get("memory", "persistent"),
            map_memory=bool(data.get("mapMemory", False)),
            info_sharing=None if sharing is None else int(sharing["radius"]),
            belief_cap=int(data.get("beliefCap", 10_000)),
        )


PERFECT = InfoMode()


@dataclass(frozen=True)
class Observation:
    """One team's view: cell kinds in the ball, opponents caught in it."""

    team: Team
    visible_cells: tuple[tuple[Coord, int], ...]  # sorted by cell
    visible_opponents: tuple[tuple[int, Coord], ...]

    def cell_map(self) -> dict[Coord, int]:
        return dict(self.visible_cells)


def _ball_cells(arena: Arena, centers, radius: int):
    """All in-bounds coords within Manhattan ``radius`` of any center."""
    out = set()
    if arena.is_graph:
        # graph arenas have no lattice; distance is hop count over edges
        for c in centers:
            frontier = {arena.cell_id(c)}
            seen = set(frontier)
            out |= {arena.coord_of(v) for v in frontier}
            for _ in range(radius):
                frontier = {
                    w
                    for v in frontier
                    for w in arena.nbr_cells(v)
                    if w not in seen
                }
                seen |= frontier
                out |= {arena.coord_of(v) for v in frontier}
        return out
    for c in centers:
        for dx in range(-radius, radius + 1):
            budget = radius - abs(dx)
            for dy in range(-budget, budget + 1):
                p = Coord(c[0] + dx, c[1] + dy)
                if arena.in_bounds(p):
                    out.add(p)
    return out


def _visible_cells(arena: Arena, own, radius: int) -> set[Coord]:
    """The team's view: Manhattan balls around members plus all zones."""
    cells = _ball_cells(arena, own, radius)
    for zone_cells in arena.zones.values():
        cells |= {arena.coord_of(c) for c in zone_cells}
    return cells


def observe(
    arena: Arena,
    state: GameState,
    team: Team,
    obs_radius: int,
    members: tuple[int, ...] | None = None,
) -> Observation:
    """Project ``state`` onto what ``team`` sees.

    ``members`` restricts the view to a subset of the team (used for
    per-member beliefs before information sharing); the default is the
    whole team.  Zone cells are always visible no matter the radius.
    """
    own = state.positions(team)
    if members is not None:
        own = tuple(own[i] for i in members)
    cells = _visible_cells(arena, own, obs_radius)
    opp = state.positions(team.opponent)
    vis_opp = tuple(
        (i, pos) for i, pos in enumerate(opp) if pos in cells
    )
    vis_cells = tuple(sorted((c, arena.kind_at(c)) for c in cells))
    return Observation(team=team, visible_cells=vis_cells, visible_opponents=vis_opp)


@dataclass(frozen=True)
class BeliefState:
    """Everything one side knows: own spots exact, the rest a set."""

    team: Team
    own: tuple[Coord, ...]
    opponent_belief: frozenset  # of opponent position tuples
    known_walls: frozenset = frozenset()
    memory: str = "persistent"

    def to_json(self) -> dict:
        return {
            "team": self.team.value,
            "own": [list(c) for c in self.own],
            "opponentBelief": sorted(
                [list(p) for p in cfg_tuple] for cfg_tuple in self.opponent_belief
            ),
            "knownWalls": sorted(list(c) for c in self.known_walls),
            "memory": self.memory,
        }


def _placements(arena: Arena, count: int, blocked, allow_zones: bool):
    """Every ordered ``count``-tuple of distinct open cells off ``blocked``."""
    cells = [
        arena.coord_of(i)
        for i in arena.open_cells()
        if (allow_zones or arena.kinds[i] <= 0) and arena.coord_of(i) not in blocked
    ]
    return itertools.permutations(cells, count)


def _consistent_with(arena: Arena, cfg: GameConfig, team: Team, vis, pinned):
    """All opponent placements one (visible cells, pinned members) view permits."""
    opp_team = team.opponent
    n_opp = cfg.cop_count if opp_team == Team.COPS else cfg.robber_count
    allow_zones = opp_team == Team.ROBBERS  # cops never stand in zones
    out = set()
    for combo in _placements(arena, n_opp, (), allow_zones):
        ok = True
        for i, pos in enumerate(combo):
            if i in pinned:
                if pos != pinned[i]:
                    ok = False
                    break
            elif pos in vis:
                ok = False  # a visible-empty cell cannot hold an opponent
                break
        if ok:
            out.add(tuple(combo))
    return frozenset(out)


def _consistent_alone(arena: Arena, cfg: GameConfig, obs: Observation, team: Team):
    """All opponent placements a single observation permits."""
    return _consistent_with(
        arena, cfg, team, obs.cell_map(), dict(obs.visible_opponents)
    )


def initial_belief(
    arena: Arena,
    cfg: GameConfig,
    state: GameState,
    team: Team,
    mode: InfoMode,
    members: tuple[int, ...] | None = None,
) -> BeliefState:
    obs = observe(arena, state, team, mode.obs_radius, members=members)
    belief = _consistent_alone(arena, cfg, obs, team)
    walls = frozenset(
        c for c, k in obs.visible_cells if k == -1
    ) if mode.map_memory else frozenset()
    return BeliefState(
        team=team,
        own=state.positions(team),
        opponent_belief=belief,
        known_walls=walls,
        memory=mode.memory,
    )


def _opponent_moves(arena: Arena, cfg: GameConfig, own, opp_tuple, opp_team: Team):
    """Successor opponent tuples from one placement, by the movement rules."""
    probe = GameState(
        cops=opp_tuple if opp_team == Team.COPS else own,
        robbers=opp_tuple if opp_team == Team.ROBBERS else own,
        turn=opp_team,
        monitors=(MONITOR_START,) * cfg.robber_count,
    )
    return [mv.destinations for mv in legal_joint_moves(arena, cfg, probe)]


def update_belief(
    arena: Arena,
    cfg: GameConfig,
    belief: BeliefState,
    state: GameState,
    mode: InfoMode,
    moved_team: Team,
    members: tuple[int, ...] | None = None,
) -> BeliefState:
    """Advance a belief past one joint move to the new true ``state``.

    The observation is regenerated from the true state; persistent mode
    images the old belief through the opponent's move first, amnesic mode
    starts over from the observation.  Walls seen along the way accrete
    into knownWalls under map memory.  ``members`` narrows the observing
    subset, as in :func:`observe`.
    """
    team = belief.team
    obs = observe(arena, state, team, mode.obs_radius, members=members)
    own = state.positions(team)
    if mode.memory == "amnesic":
        candidates = _consistent_alone(arena, cfg, obs, team)
    else:
        if moved_team == team:
            candidates = belief.opponent_belief
        else:
            candidates = frozenset(
                dst
                for src in belief.opponent_belief
                for dst in _opponent_moves(arena, cfg, belief.own, src, team.opponent)
            )
        cell_map = obs.cell_map()
        pinned = dict(obs.visible_opponents)
        kept = set()
        for combo in candidates:
            ok = True
            for i, pos in enumerate(combo):
                if i in pinned:
                    if pos != pinned[i]:
                        ok = False
                        break
                elif pos in cell_map:
                    ok = False
                    break
            if ok:
                kept.add(combo)
        candidates = frozenset(kept)
    if not candidates:
        raise ScenarioError("belief update filtered out every configuration")
    if len(candidates) > mode.belief_cap:
        raise CapExceededError(f"belief grew past the cap of {mode.belief_cap}")
    walls = belief.known_walls
    if mode.map_memory:
        walls = walls | frozenset(c for c, k in obs.visible_cells if k == -1)
    return BeliefState(
        team=team,
        own=own,
        opponent_belief=candidates,
        known_walls=walls,
        memory=mode.memory,
    )


def track_beliefs(
    arena: Arena,
    cfg: GameConfig,
    states,
    team: Team,
    mode: InfoMode,
) -> list[BeliefState]:
    """Belief after each state of a recorded trace, starting at states[0]."""
    if not states:
        return []
    beliefs = [initial_belief(arena, cfg, states[0], team, mode)]
    for prev, cur in zip(states, states[1:]):
        beliefs.append(
            update_belief(arena, cfg, beliefs[-1], cur, mode, moved_team=prev.turn)
        )
    return beliefs


def _share_groups(arena: Arena, own, radius: int | None) -> list[tuple[int, ...]]:
    """Who hears whom: member i pools the views of teammates within ``radius``.

    Sharing is pairwise and nobody relays, so groups may overlap.  Radius 0
    never links two members (they cannot share a cell) and None disables
    sharing outright; both leave every member alone with its own view.
    """
    if radius is None:
        return [(i,) for i in range(len(own))]
    groups = []
    for i, pos in enumerate(own):
        ball = _ball_cells(arena, (pos,), radius)
        groups.append(tuple(j for j, q in enumerate(own) if j == i or q in ball))
    return groups


def track_member_beliefs(
    arena: Arena,
    cfg: GameConfig,
    states,
    team: Team,
    mode: InfoMode,
) -> list[list[BeliefState]]:
    """Per-member beliefs along a trace, one inner list per state.

    Each member filters its own belief with the pooled observation of its
    sharing group at that state (``mode.info_sharing`` is the radius).
    """
    if not states:
        return []
    own0 = states[0].positions(team)
    groups = _share_groups(arena, own0, mode.info_sharing)
    rows = [
        [
            initial_belief(arena, cfg, states[0], team, mode, members=groups[i])
            for i in range(len(own0))
        ]
    ]
    for prev, cur in zip(states, states[1:]):
        own = cur.positions(team)
        groups = _share_groups(arena, own, mode.info_sharing)
        rows.append(
            [
                update_belief(
                    arena, cfg, rows[-1][i], cur, mode,
                    moved_team=prev.turn, members=groups[i],
                )
                for i in range(len(own))
            ]
        )
    return rows


# ---------------------------------------------------------------------------
# knowledge game: fold beliefs into a perfect-information graph


class KnowledgeState(NamedTuple):
    """One node of the knowledge game.

    The system team's positions and monitors are exact; the opponent
    side's position field is empty and ``belief`` holds every opponent
    placement consistent with the observations so far.  ``phase`` is
    "play" for ordinary turns and "reveal" for environment-owned split
    points where an ambiguous observation is about to resolve.
    """

    cops: tuple[Coord, ...]
    robbers: tuple[Coord, ...]
    turn: Team
    monitors: tuple
    belief: frozenset
    phase: str = "play"

    def positions(self, team: Team) -> tuple[Coord, ...]:
        return self.cops if team == Team.COPS else self.robbers


@dataclass(frozen=True)
class KnowledgeGameSpec:
    cfg: GameConfig
    obs_radius: int = 1
    belief_cap: int = 10_000

    def __post_init__(self):
        if self.obs_radius < 1:
            raise ScenarioError("obsRadius must be at least 1")


def _mk(sys_team: Team, own, belief, turn, monitors, phase) -> KnowledgeState:
    if sys_team == Team.COPS:
        return KnowledgeState(own, (), turn, monitors, belief, phase)
    return KnowledgeState((), own, turn, monitors, belief, phase)


def _obs_key(vis_cells, config) -> tuple:
    """What the system would see of one opponent placement."""
    return tuple((i, p) for i, p in enumerate(config) if p in vis_cells)


def build_knowledge_game(
    arena: Arena, spec: KnowledgeGameSpec, init: GameState
) -> GameGraph:
    """Reduce a limited-visibility game to a perfect-information graph.

    Nodes track the system team exactly plus a belief set of opponent
    placements; the environment is omniscient (worst case) and resolves
    both its move and, at reveal nodes, which observation class the play
    falls into.  The system only commits to moves legal under every
    believed placement, and capture, violations, and stuckness become
    terminal only when every placement agrees, which observation
    uniformity guarantees per class.  The result is solvable by the
    ordinary solver.
    """
    t0 = time.perf_counter()
    cfg = spec.cfg
    sys_team = cfg.system_team
    env_team = sys_team.opponent
    radius = spec.obs_radius
    zone_count = arena.zone_count if cfg.variant == Variant.SAFE_ZONE_LIVENESS else 0

    amnesic = cfg.info_mode is not None and getattr(cfg.info_mode, "memory", "") == "amnesic"

    def settle(own_now, cls) -> frozenset:
        """The belief a play node carries.

        Persistent memory keeps the filtered class; amnesic memory widens
        it back to everything the current observation alone permits (the
        class fixes the observation, so any representative yields it).
        """
        if not amnesic:
            return frozenset(cls)
        vis_now = _visible_cells(arena, own_now, radius)
        key = _obs_key(vis_now, next(iter(cls)))
        return _consistent_with(arena, cfg, sys_team, vis_now, dict(key))

    own0 = init.positions(sys_team)
    obs0 = observe(arena, init, sys_team, radius)
    b0 = _consistent_alone(arena, cfg, obs0, sys_team)
    if init.positions(env_team) not in b0:
        raise ScenarioError("initial observation rules out the real opponents")
    mon0 = init.monitors if sys_team == Team.ROBBERS else ()
    init_k = _mk(sys_team, own0, b0, init.turn, mon0, "play")

    index: dict[KnowledgeState, int] = {init_k: 0}
    states: list[KnowledgeState] = [init_k]
    term: list[int] = []
    turnbits: list[int] = []
    succ_lists: list[list[int]] = []
    beliefs_seen = {b0}

    def intern(node: KnowledgeState) -> int:
        j = index.get(node)
        if j is None:
            j = len(states)
            if j >= cfg.state_cap:
                raise CapExceededError(
                    f"knowledge states exceed the cap of {cfg.state_cap}"
                )
            if node.belief not in beliefs_seen:
                beliefs_seen.add(node.belief)
                if len(beliefs_seen) > spec.belief_cap:
                    raise CapExceededError(
                        f"distinct belief sets exceed the cap of {spec.belief_cap}"
                    )
            index[node] = j
            states.append(node)
        return j

    def node_code(node: KnowledgeState) -> int:
        own_set = set(node.positions(sys_team))
        captured = [any(p in own_set for p in config) for config in node.belief]
        if captured and all(captured):
            return TERM_CAPTURE
        assert not any(captured), "capture must be observation-uniform"
        if any(m.violated is not None for m in node.monitors):
            return TERM_VIOLATION
        return TERM_NONE

    pos = 0
    while pos < len(states):
        node = states[pos]
        pos += 1
        turnbits.append(0 if node.turn == Team.COPS else 1)
        # reveal nodes hold a not-yet-split belief, so capture may hold in
        # some placements only; the class nodes after the split classify
        code = TERM_NONE if node.phase == "reveal" else node_code(node)
        if code != TERM_NONE:
            term.append(code)
            succ_lists.append([])
            continue
        own = node.positions(sys_team)

        if node.phase == "reveal":
            vis = _visible_cells(arena, own, radius)
            classes: dict[tuple, set] = {}
            for config in node.belief:
                classes.setdefault(_obs_key(vis, config), set()).add(config)
            term.append(TERM_NONE)
            succ_lists.append(
                [
                    intern(
                        _mk(sys_team, own, settle(own, classes[k]), node.turn,
                            node.monitors, "play")
                    )
                    for k in sorted(classes)
                ]
            )
            continue

        if node.turn == sys_team:
            if sys_team == Team.COPS:
                probe = GameState(cops=own, robbers=(), turn=Team.COPS, monitors=())
                moves = legal_joint_moves(arena, cfg, probe)
            else:
                probe = GameState(
                    cops=(), robbers=own, turn=Team.ROBBERS, monitors=node.monitors
                )
                # only moves legal under every believed cop placement
                maybe_cop = set().union(*node.belief) if node.belief else set()
                moves = [
                    mv
                    for mv in legal_joint_moves(arena, cfg, probe)
                    if all(d not in maybe_cop for d in mv.destinations)
                ]
            if not moves:
                term.append(
                    TERM_COPS_STUCK if sys_team == Team.COPS else TERM_ROBBERS_STUCK
                )
                succ_lists.append([])
                continue
            term.append(TERM_NONE)
            out = []
            for mv in moves:
                dest = mv.destinations
                mon2 = node.monitors
                if zone_count and sys_team == Team.ROBBERS:
                    mon2 = tuple(
                        monitor_step(m, max(arena.kind_at(d), 0), zone_count).state
                        for m, d in zip(node.monitors, dest)
                    )
                if any(m.violated is not None for m in mon2):
                    out.append(
                        intern(_mk(sys_team, dest, node.belief, env_team, mon2, "play"))
                    )
                    continue
                vis2 = _visible_cells(arena, dest, radius)
                split: dict[tuple, set] = {}
                for config in node.belief:
                    split.setdefault(_obs_key(vis2, config), set()).add(config)
                if len(split) == 1:
                    only = settle(dest, next(iter(split.values())))
                    out.append(intern(_mk(sys_team, dest, only, env_team, mon2, "play")))
                else:
                    out.append(
                        intern(_mk(sys_team, dest, node.belief, env_team, mon2, "reveal"))
                    )
            succ_lists.append(out)
            continue

        # environment turn: omniscient, so it resolves placement, move,
        # and resulting observation class in one choice
        vis = _visible_cells(arena, own, radius)
        classes = {}
        for config in node.belief:
            if env_team == Team.COPS:
                probe = GameState(cops=config, robbers=own, turn=Team.COPS, monitors=())
            else:
                probe = GameState(cops=own, robbers=config, turn=Team.ROBBERS, monitors=())
            for mv in legal_joint_moves(arena, cfg, probe):
                moved = mv.destinations
                classes.setdefault(_obs_key(vis, moved), set()).add(moved)
        if not classes:
            term.append(
                TERM_COPS_STUCK if env_team == Team.COPS else TERM_ROBBERS_STUCK
            )
            succ_lists.append([])
            continue
        term.append(TERM_NONE)
        succ_lists.append(
            [
                intern(
                    _mk(sys_team, own, settle(own, classes[k]), sys_team,
                        node.monitors, "play")
                )
                for k in sorted(classes)
            ]
        )

    n = len(states)
    succ_off = np.zeros(n + 1, dtype=np.int64)
    np.cumsum([len(o) for o in succ_lists], out=succ_off[1:])
    succ = (
        np.asarray([v for out in succ_lists for v in out], dtype=np.int32)
        if succ_off[-1]
        else np.empty(0, dtype=np.int32)
    )
    return GameGraph(
        arena,
        cfg,
        0,
        np.asarray(turnbits, dtype=np.int8),
        np.asarray(term, dtype=np.int8),
        succ_off,
        succ,
        states=states,
        meta={
            "backend": "knowledge",
            "obs_radius": radius,
            "belief_sets": len(beliefs_seen),
            "build_ms": (time.perf_counter() - t0) * 1000.0,
        },
    )
