"""Explicit game graphs: reachable-state enumeration into CSR arrays.

States are enumerated breadth-first from the initial state.  Each state
is either expanded into its legal joint moves or classified terminal:
capture, a stuck team, or a broken safe-zone promise.  Successor lists
are kept in canonical joint-move order so that "first edge achieving the
best rank" coincides with the documented tie-breaking rule.

Two state tables exist: small or irregular games keep a list of
GameState objects; grid games pack each state into one int64 (position
digits base cell-count, then monitor digits, then the turn bit) so the
hot builder and solver kernels can work on flat arrays.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arena import Arena, Coord, OPEN
from .errors import CapExceededError, ScenarioError
from .game import (
    GameConfig,
    GameState,
    JointMove,
    Team,
    MoveRule,
    Variant,
    is_capture,
    has_violation,
    legal_joint_moves,
    member_destinations,
)
from .monitors import ObligationTable

TERM_NONE = 0
TERM_CAPTURE = 1
TERM_ROBBERS_STUCK = 2
TERM_COPS_STUCK = 3
TERM_VIOLATION = 4

# terminal class -> team that wins the play there
_TERM_WINNER = {
    TERM_CAPTURE: Team.COPS,
    TERM_ROBBERS_STUCK: Team.COPS,
    TERM_VIOLATION: Team.COPS,
    TERM_COPS_STUCK: Team.ROBBERS,
}


class PackCodec:
    """Bijection between GameStates and int64 keys for one (arena, cfg).

    Digit layout, most significant first: cop cells, robber cells (base
    n_cells), robber monitor codes (base montable.n_total), turn bit.
    """

    def __init__(self, arena: Arena, cfg: GameConfig):
        self.arena = arena
        self.cfg = cfg
        zone_count = arena.zone_count if cfg.variant == Variant.SAFE_ZONE_LIVENESS else 0
        self.montable = ObligationTable(zone_count)
        self.n_cells = arena.n_cells
        self.n_mon = self.montable.n_total
        bits = (cfg.cop_count + cfg.robber_count) * max(self.n_cells - 1, 1).bit_length()
        bits += cfg.robber_count * max(self.n_mon - 1, 1).bit_length() + 1
        self.packable = True
        cap = 2 * (self.n_mon ** cfg.robber_count) * (self.n_cells ** (cfg.cop_count + cfg.robber_count))
        if cap >= 2 ** 62:
            self.packable = False

    def encode(self, s: GameState) -> int:
        arena, cfg = self.arena, self.cfg
        key = 0
        for c in s.cops:
            key = key * self.n_cells + arena.cell_id(c)
        for r in s.robbers:
            key = key * self.n_cells + arena.cell_id(r)
        mons = s.monitors or tuple(
            self.montable.state_of(0) for _ in range(cfg.robber_count)
        )
        for m in mons:
            key = key * self.n_mon + self.montable.code_of(m)
        return key * 2 + (0 if s.turn == Team.COPS else 1)

    def decode(self, key: int) -> GameState:
        cfg = self.cfg
        key = int(key)
        turn = Team.COPS if key % 2 == 0 else Team.ROBBERS
        key //= 2
        mons = []
        for _ in range(cfg.robber_count):
            mons.append(self.montable.state_of(key % self.n_mon))
            key //= self.n_mon
        mons.reverse()
        cells = []
        for _ in range(cfg.cop_count + cfg.robber_count):
            cells.append(self.arena.coord_of(key % self.n_cells))
            key //= self.n_cells
        cells.reverse()
        return GameState(
            cops=tuple(cells[: cfg.cop_count]),
            robbers=tuple(cells[cfg.cop_count :]),
            turn=turn,
            monitors=tuple(mons),
        )

    def decode_digits(self, packed: np.ndarray) -> dict:
        """Vectorized digit split of a packed array (for acceptance sets)."""
        cfg = self.cfg
        rest = packed.astype(np.int64).copy()
        turn = (rest % 2).astype(np.int8)
        rest //= 2
        mons = []
        for _ in range(cfg.robber_count):
            mons.append(rest % self.n_mon)
            rest //= self.n_mon
        mons.reverse()
        robs = []
        for _ in range(cfg.robber_count):
            robs.append(rest % self.n_cells)
            rest //= self.n_cells
        robs.reverse()
        cops = []
        for _ in range(cfg.cop_count):
            cops.append(rest % self.n_cells)
            rest //= self.n_cells
        cops.reverse()
        return {"turn": turn, "monitors": mons, "robbers": robs, "cops": cops}


class GameGraph:
    """Reachable game graph in CSR form plus acceptance bookkeeping."""

    def __init__(
        self,
        arena: Arena,
        cfg: GameConfig,
        init_index: int,
        turn: np.ndarray,
        term: np.ndarray,
        succ_off: np.ndarray,
        succ: np.ndarray,
        states: list[GameState] | None = None,
        packed: np.ndarray | None = None,
        codec: PackCodec | None = None,
        meta: dict | None = None,
    ):
        self.arena = arena
        self.cfg = cfg
        self.init_index = init_index
        self.turn = turn
        self.term = term
        self.succ_off = succ_off
        self.succ = succ
        self.states = states
        self.packed = packed
        self.codec = codec
        self.meta = meta or {}
        self.n = len(turn)
        self.m = len(succ)
        sys_bit = 0 if cfg.system_team == Team.COPS else 1
        self.owner_system = turn == sys_bit
        self._pred = None
        self._lookup = None
        self.acceptance = self._acceptance_sets()

    # -- state access ----------------------------------------------------

    def state(self, i: int) -> GameState:
        if self.states is not None:
            return self.states[i]
        return self.codec.decode(int(self.packed[i]))

    def index_of(self, s: GameState) -> int | None:
        """Index of ``s`` in this graph, or None if unreachable."""
        if self._lookup is None:
            if self.states is not None:
                self._lookup = {st: i for i, st in enumerate(self.states)}
            else:
                self._lookup = {int(k): i for i, k in enumerate(self.packed)}
        key = s if self.states is not None else self.codec.encode(s)
        return self._lookup.get(key)

    def successors(self, i: int) -> np.ndarray:
        return self.succ[self.succ_off[i] : self.succ_off[i + 1]]

    def edge_move(self, u: int, v: int) -> JointMove:
        team = Team.COPS if self.turn[u] == 0 else Team.ROBBERS
        return JointMove(team, self.state(v).positions(team))

    def find_successor(self, u: int, destinations: Sequence[Coord]) -> int | None:
        dests = tuple(Coord(*d) for d in destinations)
        team = Team.COPS if self.turn[u] == 0 else Team.ROBBERS
        for v in self.successors(u):
            if self.state(int(v)).positions(team) == dests:
                return int(v)
        return None

    def pred_csr(self) -> tuple[np.ndarray, np.ndarray]:
        if self._pred is None:
            if self.m == 0:
                self._pred = (np.zeros(self.n + 1, dtype=np.int64), np.empty(0, dtype=np.int32))
            else:
                edge_src = np.repeat(
                    np.arange(self.n, dtype=np.int32), np.diff(self.succ_off)
                )
                order = np.argsort(self.succ, kind="stable")
                pred = edge_src[order]
                counts = np.bincount(self.succ, minlength=self.n)
                off = np.zeros(self.n + 1, dtype=np.int64)
                np.cumsum(counts, out=off[1:])
                self._pred = (off, pred)
        return self._pred

    # -- winners at terminals ---------------------------------------------

    def terminal_winner(self, i: int) -> Team | None:
        t = int(self.term[i])
        return _TERM_WINNER.get(t)

    def terminal_mask(self, winner: Team) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        for code, team in _TERM_WINNER.items():
            if team == winner:
                mask |= self.term == code
        return mask

    # -- acceptance -------------------------------------------------------

    def _acceptance_sets(self) -> dict[str, np.ndarray]:
        sets: dict[str, np.ndarray] = {
            "Capture": np.flatnonzero(self.term == TERM_CAPTURE),
            "Violation": np.flatnonzero(self.term == TERM_VIOLATION),
        }
        if self.cfg.variant != Variant.SAFE_ZONE_LIVENESS:
            return sets
        # a robber standing on a zone cell marks the visit; terminal states
        # never count (violations are losing, stuck states end the play)
        zone_count = self.arena.zone_count
        live = self.term == TERM_NONE
        if self.states is not None:
            on_zone = np.zeros((self.cfg.robber_count, self.n), dtype=np.int64)
            for i, s in enumerate(self.states):
                for r, pos in enumerate(s.robbers):
                    on_zone[r, i] = max(self.arena.kind_at(pos), 0)
        else:
            digits = self.codec.decode_digits(self.packed)
            kinds = np.maximum(np.asarray(self.arena.kinds, dtype=np.int64), 0)
            on_zone = np.stack(
                [kinds[digits["robbers"][r]] for r in range(self.cfg.robber_count)]
            )
        for r in range(self.cfg.robber_count):
            for z in range(1, zone_count + 1):
                sets[f"SZ{z}Visit_r{r}"] = np.flatnonzero((on_zone[r] == z) & live)
        return sets

    # -- diagnostics ------------------------------------------------------

    def dump(self, fp) -> None:
        """One state per line: idx owner positions monitor flags."""
        term_names = {
            TERM_NONE: "-",
            TERM_CAPTURE: "capture",
            TERM_ROBBERS_STUCK: "robbers_stuck",
            TERM_COPS_STUCK: "cops_stuck",
            TERM_VIOLATION: "violation",
        }
        for i in range(self.n):
            s = self.state(i)
            owner = "S" if self.owner_system[i] else "E"
            cops = " ".join(f"{c.x},{c.y}" for c in s.cops)
            robs = " ".join(f"{r.x},{r.y}" for r in s.robbers)
            mons = " ".join(
                m.violated or f"o{m.owed}i{m.inside}l{m.last_zone}" for m in s.monitors
            )
            fp.write(f"{i} {owner} {cops} {robs} {mons or '-'} {term_names[int(self.term[i])]}\n")


def _classify(arena: Arena, cfg: GameConfig, s: GameState) -> int:
    if is_capture(arena, s):
        return TERM_CAPTURE
    if has_violation(s):
        return TERM_VIOLATION
    return TERM_NONE


def _build_pure(arena: Arena, cfg: GameConfig, init: GameState) -> GameGraph:
    t0 = time.perf_counter()
    index: dict[GameState, int] = {init: 0}
    states: list[GameState] = [init]
    succ_lists: list[list[int]] = []
    term: list[int] = []
    turn: list[int] = []
    pos = 0
    while pos < len(states):
        s = states[pos]
        turn.append(0 if s.turn == Team.COPS else 1)
        t = _classify(arena, cfg, s)
        if t != TERM_NONE:
            term.append(t)
            succ_lists.append([])
            pos += 1
            continue
        moves = legal_joint_moves(arena, cfg, s)
        if not moves:
            term.append(
                TERM_COPS_STUCK if s.turn == Team.COPS else TERM_ROBBERS_STUCK
            )
            succ_lists.append([])
            pos += 1
            continue
        term.append(TERM_NONE)
        out = []
        for mv in moves:
            nxt = _apply_fast(arena, cfg, s, mv)
            j = index.get(nxt)
            if j is None:
                j = len(states)
                if j >= cfg.state_cap:
                    raise CapExceededError(
                        f"reachable states exceed the cap of {cfg.state_cap}"
                    )
                index[nxt] = j
                states.append(nxt)
            out.append(j)
        succ_lists.append(out)
        pos += 1
    n = len(states)
    succ_off = np.zeros(n + 1, dtype=np.int64)
    np.cumsum([len(o) for o in succ_lists], out=succ_off[1:])
    succ = np.asarray(
        [v for out in succ_lists for v in out], dtype=np.int32
    ) if succ_off[-1] else np.empty(0, dtype=np.int32)
    g = GameGraph(
        arena,
        cfg,
        0,
        np.asarray(turn, dtype=np.int8),
        np.asarray(term, dtype=np.int8),
        succ_off,
        succ,
        states=states,
        meta={"backend": "pure", "build_ms": (time.perf_counter() - t0) * 1000.0},
    )
    return g


def _apply_fast(arena: Arena, cfg: GameConfig, s: GameState, mv: JointMove) -> GameState:
    """apply_joint_move without re-validating (moves come from the generator)."""
    from .monitors import monitor_step

    if mv.team == Team.COPS:
        return GameState(mv.destinations, s.robbers, Team.ROBBERS, s.monitors)
    monitors = s.monitors
    if cfg.variant == Variant.SAFE_ZONE_LIVENESS:
        monitors = tuple(
            monitor_step(m, max(arena.kind_at(d), 0), arena.zone_count).state
            for m, d in zip(s.monitors, mv.destinations)
        )
    return GameState(s.cops, mv.destinations, Team.COPS, monitors)


def _candidate_tables(arena: Arena, cfg: GameConfig):
    """Per-cell destination lists for each team as padded int32 arrays."""
    n = arena.n_cells
    allow_stay = cfg.move_rule == MoveRule.ALLOW_STAY
    cop_lists, rob_lists = [], []
    for cell in range(n):
        nbrs = list(arena.nbr_cells(cell))
        if arena.kinds[cell] == -1:
            cop_lists.append([])
            rob_lists.append([])
            continue
        mine = sorted(nbrs + [cell]) if allow_stay else nbrs
        rob_lists.append(mine)
        cop_lists.append([c for c in mine if arena.kinds[c] <= OPEN])
    maxd = max(max((len(l) for l in cop_lists), default=1), max((len(l) for l in rob_lists), default=1), 1)

    def pad(lists):
        arr = np.full((n, maxd), -1, dtype=np.int32)
        cnt = np.zeros(n, dtype=np.int32)
        for i, l in enumerate(lists):
            arr[i, : len(l)] = l
            cnt[i] = len(l)
        return arr, cnt

    cop_arr, cop_cnt = pad(cop_lists)
    rob_arr, rob_cnt = pad(rob_lists)
    return cop_arr, cop_cnt, rob_arr, rob_cnt


def build_game_graph(
    arena: Arena, cfg: GameConfig, init: GameState, backend: str | None = None
) -> GameGraph:
    """Enumerate the reachable game graph from ``init``.

    ``backend`` is "pure", "compiled", or None for the package default
    (compiled when the extension is importable and the state space packs
    into int64 digits, else pure).
    """
    from . import core

    if len(init.cops) != cfg.cop_count or len(init.robbers) != cfg.robber_count:
        raise ScenarioError("initial state does not match configured team sizes")
    codec = PackCodec(arena, cfg)
    if backend is None:
        backend = "compiled" if (core.has_compiled() and codec.packable) else "pure"
    if backend == "pure":
        return _build_pure(arena, cfg, init)
    if backend != "compiled":
        raise ValueError(f"unknown backend {backend!r}")
    if not core.has_compiled():
        raise RuntimeError("compiled backend requested but extension not importable")
    if not codec.packable:
        raise RuntimeError("state space too large to pack into int64 digits")

    t0 = time.perf_counter()
    cop_arr, cop_cnt, rob_arr, rob_cnt = _candidate_tables(arena, cfg)
    mt = codec.montable
    mon_next = np.asarray(mt.next_code, dtype=np.int32)
    cell_zone = np.asarray([max(k, 0) for k in arena.kinds], dtype=np.int32)
    built = core._speedups.build_packed(
        np.int64(codec.encode(init)),
        np.int32(arena.n_cells),
        np.int32(cfg.cop_count),
        np.int32(cfg.robber_count),
        np.int32(mt.n_valid),
        np.int32(mt.n_total),
        cop_arr,
        cop_cnt,
        rob_arr,
        rob_cnt,
        mon_next,
        cell_zone,
        np.int64(cfg.state_cap),
    )
    if built is None:
        raise CapExceededError(f"reachable states exceed the cap of {cfg.state_cap}")
    packed, turn, term, succ_off, succ = built
    return GameGraph(
        arena,
        cfg,
        0,
        turn,
        term,
        succ_off,
        succ,
        packed=packed,
        codec=codec,
        meta={"backend": "compiled", "build_ms": (time.perf_counter() - t0) * 1000.0},
    )
