"""Slow, independent reference solvers used to cross-check the engine.

Everything here recomputes fixpoints by full scans over dict-of-sets
graphs built directly from the movement rules, sharing no code with the
CSR builders or the attractor kernels.  Winner classification semantics
(stuck teams, capture immunity, broken promises) are re-derived from the
same rule functions the engine builds on, but the search itself is a
separate implementation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import CapExceededError, ScenarioError
from .game import (
    GameConfig,
    GameState,
    Team,
    Variant,
    apply_joint_move,
    has_violation,
    is_capture,
    legal_joint_moves,
)


@dataclass
class OracleResult:
    winner: str  # "system" | "environment"
    sys_states: set
    env_states: set
    n_states: int


def _enumerate(arena, cfg, init, bound):
    """Breadth-first closure of reachable states via the rule functions."""
    succ: dict[GameState, list[GameState]] = {}
    kind: dict[GameState, str] = {}
    frontier = [init]
    seen = {init}
    while frontier:
        s = frontier.pop()
        if is_capture(arena, s):
            kind[s] = "capture"
            succ[s] = []
            continue
        if has_violation(s):
            kind[s] = "violation"
            succ[s] = []
            continue
        moves = legal_joint_moves(arena, cfg, s)
        if not moves:
            kind[s] = "cops_stuck" if s.turn == Team.COPS else "robbers_stuck"
            succ[s] = []
            continue
        kind[s] = "play"
        outs = []
        for mv in moves:
            t = apply_joint_move(arena, cfg, s, mv)
            outs.append(t)
            if t not in seen:
                if len(seen) >= bound:
                    raise CapExceededError(f"oracle enumeration exceeded {bound} states")
                seen.add(t)
                frontier.append(t)
        succ[s] = outs
    return succ, kind


def _force(succ, owner_is_player, targets):
    """Naive least fixpoint: full rescans until nothing changes.

    A player-owned state wins with some winning successor, an
    opponent-owned state with all successors winning (vacuously when the
    opponent is stuck).
    """
    win = set(targets)
    changed = True
    while changed:
        changed = False
        for s, outs in succ.items():
            if s in win:
                continue
            if owner_is_player(s):
                ok = any(t in win for t in outs)
            else:
                # vacuously true for a stuck opponent, matching the stuck rule
                ok = all(t in win for t in outs)
            if ok:
                win.add(s)
                changed = True
    return win


def _cop_win_terminals(kind):
    return {s for s, k in kind.items() if k in ("capture", "violation", "robbers_stuck")}


def brute_force_oracle(arena, cfg: GameConfig, init: GameState, bound: int = 400_000) -> OracleResult:
    """Backward induction over the full reachable graph, by recomputation."""
    succ, kind = _enumerate(arena, cfg, init, bound)
    states = set(succ)
    if cfg.variant == Variant.COP_PURSUIT:
        win_cops = _force(succ, lambda s: s.turn == Team.COPS, _cop_win_terminals(kind))
        sys_states = win_cops
        env_states = states - win_cops
    elif cfg.variant == Variant.CLASSIC_PURSUIT:
        win_cops = _force(succ, lambda s: s.turn == Team.COPS, _cop_win_terminals(kind))
        env_states = win_cops
        sys_states = states - win_cops
    else:
        sys_base = _recurrence_regions(arena, cfg, succ, kind)
        sys_states = sys_base
        env_states = states - sys_base
    winner = "system" if init in sys_states else "environment"
    return OracleResult(winner, sys_states, env_states, len(states))


def _zones_occupied(arena, state: GameState):
    """Zone id each robber is standing on (0 when off-zone)."""
    return [max(arena.kind_at(pos), 0) for pos in state.robbers]


def _recurrence_regions(arena, cfg, succ, kind):
    """nu-mu fixpoint for "visit every (robber, zone) set infinitely often".

    Product nodes are (state, round-robin index); the winning base region
    is projected at index 0.
    """
    zone_count = arena.zone_count
    sets = [(r, z) for r in range(cfg.robber_count) for z in range(1, zone_count + 1)]
    k = len(sets)
    bad = _cop_win_terminals(kind)
    syswin = {s for s, kk in kind.items() if kk == "cops_stuck"}

    def member(s, i):
        if s in syswin:
            return True
        r, z = sets[i]
        return _zones_occupied(arena, s)[r] == z

    def pnext(s, i):
        j = (i + 1) % k if member(s, i) else i
        if s in syswin:
            return [(s, (i + 1) % k)]
        return [(t, j) for t in succ[s]]

    nodes = {(s, i) for s in succ if s not in bad for i in range(k)}

    def cpre(region, universe):
        """Nodes whose owner can keep the next node inside ``region``."""
        out = set()
        for p in universe:
            s, i = p
            outs = [q for q in pnext(s, i)]
            live = [q for q in outs if q[0] not in bad]
            if s.turn == cfg.system_team:
                if any(q in region for q in live):
                    out.add(p)
            else:
                if live and all(q in region for q in live) and len(live) == len(outs):
                    out.add(p)
                elif not outs:
                    out.add(p)
        return out

    Y = set(nodes)
    while True:
        f_nodes = {p for p in Y if member(p[0], p[1]) and p[1] == k - 1}
        target = f_nodes & cpre(Y, Y)
        # attractor toward target within Y
        X = set(target)
        changed = True
        while changed:
            changed = False
            for p in Y - X:
                s, i = p
                outs = pnext(s, i)
                live = [q for q in outs if q[0] not in bad]
                if s.turn == cfg.system_team:
                    ok = any(q in X for q in live)
                else:
                    ok = (not outs) or (len(live) == len(outs) and all(q in X for q in live))
                if ok:
                    X.add(p)
                    changed = True
        if X == Y:
            break
        Y = X
    return {s for s in succ if s not in bad and (s, 0) in Y}


def _sight(arena, own, radius: int):
    """Manhattan ball around each member, plus every zone cell."""
    out = set()
    for x in range(arena.width):
        for y in range(arena.height):
            if any(abs(x - p[0]) + abs(y - p[1]) <= radius for p in own):
                out.add((x, y))
    for cells in arena.zones.values():
        out |= {tuple(arena.coord_of(i)) for i in cells}
    return out


def _seen_of(sight, placement):
    """The visible part of one opponent placement, the split key."""
    return tuple((i, p) for i, p in enumerate(placement) if tuple(p) in sight)


def observation_strategy_search(
    arena, cfg: GameConfig, init: GameState, obs_radius: int, bound: int = 100_000
) -> OracleResult:
    """Decide whether the cops win with an observation-based strategy.

    Searches the space such strategies act on, information sets, directly:
    a cop node picks one move per set (some winning choice exists iff some
    strategy wins), then the play observes, then every robber placement
    answers with every legal move.  Both observation stages group by what
    the cops would see, and the robbers resolve which group the play is in,
    so a winning label means the cops force capture no matter the hidden
    placement.  Node layout, visibility, and the fixpoint are recomputed
    here with plain dicts and Manhattan arithmetic; movement legality comes
    from the same rule functions the engine builds on.
    """
    if cfg.variant != Variant.COP_PURSUIT:
        raise ScenarioError("observation strategy search covers the cop-pursuit variant")
    if arena.is_graph:
        raise ScenarioError("observation strategy search needs a grid arena")

    open_coords = [tuple(arena.coord_of(i)) for i in arena.open_cells()]
    sight0 = _sight(arena, init.cops, obs_radius)
    pinned0 = dict(_seen_of(sight0, init.robbers))
    b0 = frozenset(
        pl
        for pl in itertools.permutations(open_coords, cfg.robber_count)
        if all(
            (pl[i] == tuple(pinned0[i])) if i in pinned0 else (pl[i] not in sight0)
            for i in range(cfg.robber_count)
        )
    )
    if tuple(tuple(p) for p in init.robbers) not in b0:
        raise ScenarioError("initial observation rules out the real robbers")

    # node kinds: ("cop", cops, belief)      cop picks a move
    #             ("observe", cops, belief)  play splits by the new view
    #             ("move", cops, belief)     every placement answers
    succ: dict[tuple, list[tuple]] = {}
    term: dict[tuple, str] = {}
    root = ("cop" if init.turn == Team.COPS else "move", tuple(init.cops), b0)
    frontier = [root]
    seen = {root}

    def visit(node):
        if node not in seen:
            if len(seen) >= bound:
                raise CapExceededError(f"information sets exceeded {bound}")
            seen.add(node)
            frontier.append(node)
        return node

    while frontier:
        node = frontier.pop()
        kind, cops, belief = node
        cop_set = set(cops)
        if kind != "observe":
            caught = [any(tuple(p) in cop_set for p in pl) for pl in belief]
            if all(caught):
                term[node] = "capture"
                succ[node] = []
                continue
            # a robber under a cop is at distance zero, always seen, so
            # single-view beliefs agree on capture
            assert not any(caught)
        if kind == "cop":
            # Coord is a plain-tuple NamedTuple, so bare tuples probe fine
            probe = GameState(cops=cops, robbers=(), turn=Team.COPS, monitors=())
            moves = legal_joint_moves(arena, cfg, probe)
            if not moves:
                term[node] = "cops_stuck"
                succ[node] = []
                continue
            succ[node] = [
                visit(("observe", tuple(tuple(d) for d in mv.destinations), belief))
                for mv in moves
            ]
        elif kind == "observe":
            sight = _sight(arena, cops, obs_radius)
            split: dict[tuple, set] = {}
            for pl in belief:
                split.setdefault(_seen_of(sight, pl), set()).add(pl)
            succ[node] = [
                visit(("move", cops, frozenset(split[k]))) for k in sorted(split)
            ]
        else:
            sight = _sight(arena, cops, obs_radius)
            split = {}
            for pl in belief:
                probe = GameState(cops=cops, robbers=pl, turn=Team.ROBBERS, monitors=())
                for mv in legal_joint_moves(arena, cfg, probe):
                    moved = tuple(tuple(d) for d in mv.destinations)
                    split.setdefault(_seen_of(sight, moved), set()).add(moved)
            if not split:
                term[node] = "robbers_stuck"
                succ[node] = []
                continue
            succ[node] = [
                visit(("cop", cops, frozenset(split[k]))) for k in sorted(split)
            ]

    targets = {n for n, k in term.items() if k in ("capture", "robbers_stuck")}
    win = _force(succ, lambda n: n[0] == "cop", targets)
    winner = "system" if root in win else "environment"
    return OracleResult(winner, win, set(succ) - win, len(succ))
