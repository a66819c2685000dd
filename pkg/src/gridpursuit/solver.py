"""Game solving: attractors, safety, reachability, generalized recurrence.

All objectives reduce to attractor computations on the explicit graph.
Reachability (cops force capture) is one attractor; safety is its dual;
the safe-zone recurrence objective runs the classical two-fixpoint loop on
a round-robin product that cycles through the acceptance sets.  Strategies
come out as finite-memory controllers whose memory is the product
component: (graph state, round-robin index).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import attractor_arrays
from .errors import ScenarioError
from .game import GameState, JointMove, Team, Variant
from .graph import GameGraph

SYSTEM = "system"
ENVIRONMENT = "environment"


@dataclass
class Verdict:
    winner: str
    states: int
    iterations: int
    ms: float
    window_relative: bool = False

    def to_json(self) -> dict:
        return {
            "winner": self.winner,
            "windowRelative": self.window_relative,
            "states": self.states,
            "iterations": self.iterations,
            "ms": round(self.ms, 3),
        }


def attractor(
    graph: GameGraph,
    target: np.ndarray,
    player: str,
    active: np.ndarray | None = None,
    sunk: np.ndarray | None = None,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """States from which ``player`` can force the play into ``target``.

    ``target`` may be an index array or boolean mask.  Returns (bool mask,
    entry rank) where rank is the fixpoint iteration at which a state
    joined (targets at 0).  Stuck opponent states join unconditionally:
    a player whose opponent cannot move wins by the stuck rule.
    """
    n = graph.n
    tmask = np.zeros(n, dtype=np.uint8)
    if target.dtype == np.bool_ or target.dtype == np.uint8:
        tmask[target.astype(bool)] = 1
    else:
        tmask[target] = 1
    amask = (
        np.ones(n, dtype=np.uint8)
        if active is None
        else active.astype(np.uint8, copy=False)
    )
    smask = np.zeros(n, dtype=np.uint8) if sunk is None else sunk.astype(np.uint8, copy=False)
    pred_off, pred = graph.pred_csr()
    player_sys = player == SYSTEM
    in_u8, rank = attractor_arrays(
        graph.succ_off,
        graph.succ,
        pred_off,
        pred,
        graph.owner_system.astype(np.uint8),
        player_sys,
        tmask,
        amask,
        smask,
        backend=backend,
    )
    return in_u8.astype(bool), rank


@dataclass
class Solution:
    """Verdict plus everything needed to play either side afterwards."""

    verdict: Verdict
    graph: GameGraph
    objective: str
    strategy: "Strategy | None" = None
    data: dict = field(default_factory=dict)

    def sys_region(self) -> np.ndarray:
        return self.data["sys_region"]


class Strategy:
    """Finite-memory winning controller for the system team.

    Memory is a product state p = state_index * rr_count + rr_index.  For
    each system-owned product state in the winning region, ``choice`` maps
    p to the successor product state the controller commits to.  The
    round-robin index advances past acceptance set i whenever the current
    state sits in set i; reachability and safety use rr_count == 1.
    """

    def __init__(
        self,
        graph: GameGraph,
        objective: str,
        rr_count: int,
        memb: list[np.ndarray],
        choice: dict[int, int],
        q0: int,
    ):
        self.graph = graph
        self.team = graph.cfg.system_team
        self.objective = objective
        self.rr_count = rr_count
        self.memb = memb  # per acceptance set, bool over base states
        self.choice = choice
        self.q0 = q0
        self._p = q0

    # -- product bookkeeping -------------------------------------------

    def base(self, p: int) -> int:
        return p // self.rr_count

    def rr(self, p: int) -> int:
        return p % self.rr_count

    def advance(self, p: int, v: int) -> int:
        """Product successor when the base play moves state(p) -> v."""
        s, i = divmod(p, self.rr_count)
        if self.rr_count > 1 and self.memb[i][s]:
            i = (i + 1) % self.rr_count
        return v * self.rr_count + i

    # -- runtime ---------------------------------------------------------

    def reset(self) -> None:
        self._p = self.q0

    @property
    def current_state(self) -> int:
        return self.base(self._p)

    @property
    def current_rr(self) -> int:
        return self.rr(self._p)

    def system_to_move(self) -> bool:
        return bool(self.graph.owner_system[self.base(self._p)])

    def next_move(self) -> JointMove:
        """The committed system move at the current (system-owned) state."""
        p = self._p
        if p not in self.choice:
            raise ScenarioError("controller has no move here (outside winning region)")
        q = self.choice[p]
        mv = self.graph.edge_move(self.base(p), self.base(q))
        self._p = q
        return mv

    def observe_env(self, destinations) -> None:
        """Advance memory past an environment joint move to ``destinations``."""
        s = self.base(self._p)
        v = self.graph.find_successor(s, destinations)
        if v is None:
            raise ScenarioError("environment move does not match any graph edge")
        self._p = self.advance(self._p, v)

    def follow(self, v: int) -> None:
        """Jump to a chosen successor of the current base state, keeping memory.

        For graphs whose environment edges cannot be matched by destination
        lists alone (knowledge games key them by observation class), the
        caller resolves the branch and hands over the successor index.
        """
        self._p = self.advance(self._p, int(v))

    def respond(self, destinations) -> JointMove:
        self.observe_env(destinations)
        return self.next_move()

    # -- export ----------------------------------------------------------

    def walk(self):
        """Reachable product states under this controller.

        Yields (product state, kind) where kind is "system", "environment"
        or "terminal"; traversal order is deterministic BFS from q0.
        """
        seen = {self._q_norm(self.q0)}
        queue = [self._q_norm(self.q0)]
        g = self.graph
        while queue:
            p = queue.pop(0)
            s = self.base(p)
            if g.term[s] != 0:
                yield p, "terminal"
                continue
            if g.owner_system[s]:
                yield p, "system"
                nxt = [self.choice[p]]
            else:
                yield p, "environment"
                nxt = [self.advance(p, int(v)) for v in g.successors(s)]
            for q in nxt:
                if q not in seen:
                    seen.add(q)
                    queue.append(q)

    def _q_norm(self, p: int) -> int:
        return p

    def memory_size(self) -> int:
        return sum(1 for _ in self.walk())

    def to_json(self) -> dict:
        g = self.graph
        ids: dict[int, int] = {}
        states_out = []
        transitions = []
        initial_move = None

        def sid(p: int) -> int:
            if p not in ids:
                ids[p] = len(ids)
                states_out.append(
                    {
                        "id": ids[p],
                        "gameState": g.state(self.base(p)).to_json(),
                        "rrIndex": self.rr(p),
                    }
                )
            return ids[p]

        start = self.q0
        if g.owner_system[self.base(start)] and g.term[self.base(start)] == 0:
            q = self.choice[start]
            initial_move = g.edge_move(self.base(start), self.base(q)).to_json()
            start = q
        frontier = [start]
        seen = {start}
        sid(start)
        while frontier:
            p = frontier.pop(0)
            s = self.base(p)
            if g.term[s] != 0 or g.owner_system[s]:
                continue
            for v in g.successors(s):
                v = int(v)
                p2 = self.advance(p, v)
                env_move = g.edge_move(s, v)
                s2 = self.base(p2)
                if g.term[s2] != 0:
                    transitions.append(
                        {
                            "from": sid(p),
                            "envMove": env_move.to_json(),
                            "to": sid(p2),
                            "sysMove": None,
                        }
                    )
                    dest = p2
                else:
                    q = self.choice[p2]
                    transitions.append(
                        {
                            "from": sid(p),
                            "envMove": env_move.to_json(),
                            "to": sid(q),
                            "sysMove": g.edge_move(s2, self.base(q)).to_json(),
                        }
                    )
                    dest = q
                if dest not in seen:
                    seen.add(dest)
                    frontier.append(dest)
        out = {
            "variant": g.cfg.variant.value,
            "q0": ids[start],
            "memory": len(states_out),
            "states": states_out,
            "transitions": transitions,
        }
        if initial_move is not None:
            out["initialMove"] = initial_move
        return out


def _best_choice(p: int, psucc_of, rank: np.ndarray, region: np.ndarray) -> int:
    """Lowest-rank successor inside the region; ties by edge order.

    Edge order is canonical joint-move order, so the first minimal edge is
    the lexicographically smallest winning move.
    """
    best, best_rank = -1, None
    for q in psucc_of(p):
        if not region[q]:
            continue
        qr = rank[q]
        if qr < 0:
            continue
        if best_rank is None or qr < best_rank:
            best, best_rank = q, qr
    if best < 0:
        raise AssertionError("winning state has no winning successor")
    return best


def solve_reachability(graph: GameGraph, backend: str | None = None) -> Solution:
    """Cops-as-system force a terminal cop win (capture or cornering)."""
    t0 = time.perf_counter()
    target = graph.terminal_mask(Team.COPS)
    attr, rank = attractor(graph, target, SYSTEM, backend=backend)
    win = bool(attr[graph.init_index])
    verdict = Verdict(
        winner=SYSTEM if win else ENVIRONMENT,
        states=graph.n,
        iterations=int(rank.max()) + 1 if rank.max() >= 0 else 0,
        ms=(time.perf_counter() - t0) * 1000.0,
    )
    sol = Solution(
        verdict,
        graph,
        "reachability",
        data={"sys_region": attr, "rank": rank, "target": target},
    )
    if win:
        choice: dict[int, int] = {}
        for s in np.flatnonzero(attr & graph.owner_system & (graph.term == 0)):
            s = int(s)
            succs = [int(v) for v in graph.successors(s)]
            best, best_rank = -1, None
            for v in succs:
                if attr[v] and (best_rank is None or rank[v] < best_rank):
                    best, best_rank = v, rank[v]
            choice[s] = best
        sol.strategy = Strategy(graph, "reachability", 1, [], choice, graph.init_index)
    return sol


def solve_safety(graph: GameGraph, backend: str | None = None) -> Solution:
    """Robbers-as-system avoid capture, cornering, and broken promises."""
    t0 = time.perf_counter()
    bad = graph.terminal_mask(Team.COPS)
    attr_bad, rank_bad = attractor(graph, bad, ENVIRONMENT, backend=backend)
    safe = ~attr_bad
    win = bool(safe[graph.init_index])
    verdict = Verdict(
        winner=SYSTEM if win else ENVIRONMENT,
        states=graph.n,
        iterations=int(rank_bad.max()) + 1 if rank_bad.max() >= 0 else 0,
        ms=(time.perf_counter() - t0) * 1000.0,
    )
    sol = Solution(
        verdict,
        graph,
        "safety",
        data={"sys_region": safe, "attr_bad": attr_bad, "rank_bad": rank_bad},
    )
    if win:
        choice: dict[int, int] = {}
        for s in np.flatnonzero(safe & graph.owner_system & (graph.term == 0)):
            s = int(s)
            for v in graph.successors(s):
                if safe[v]:
                    choice[s] = int(v)
                    break
        sol.strategy = Strategy(graph, "safety", 1, [], choice, graph.init_index)
    return sol


def _acceptance_order(graph: GameGraph) -> list[str]:
    names = [k for k in graph.acceptance if k.startswith("SZ")]

    def key(name):
        z, r = name[2:].split("Visit_r")
        return (int(r), int(z))

    return sorted(names, key=key)


def solve_generalized_buchi(
    graph: GameGraph, set_names: list[str] | None = None, backend: str | None = None
) -> Solution:
    """Robbers-as-system visit every acceptance set infinitely often while
    staying safe.

    Degeneralization: product states (s, i) advance the round-robin index
    past set i when s is a member; the recurrence target F is membership
    in the last set at the last index.  Terminal states the system wins
    (stuck cops) get a self-loop and count as members of every set.
    """
    t0 = time.perf_counter()
    set_names = set_names or _acceptance_order(graph)
    if not set_names:
        raise ScenarioError("recurrence objective needs at least one acceptance set")
    n = graph.n
    k = len(set_names)
    iterations = 0

    bad = graph.terminal_mask(Team.COPS)
    syswin_term = graph.terminal_mask(Team.ROBBERS)
    attr_bad, rank_bad = attractor(graph, bad, ENVIRONMENT, backend=backend)
    iterations += int(rank_bad.max()) + 1 if rank_bad.max() >= 0 else 0
    safe = ~attr_bad

    memb = []
    for name in set_names:
        m = np.zeros(n, dtype=bool)
        m[graph.acceptance[name]] = True
        m |= syswin_term
        memb.append(m)

    # product CSR (base edges plus self-loops at system-won terminals)
    esrc = np.repeat(np.arange(n, dtype=np.int64), np.diff(graph.succ_off))
    edst = graph.succ.astype(np.int64)
    loops = np.flatnonzero(syswin_term).astype(np.int64)
    esrc2 = np.concatenate([esrc, loops])
    edst2 = np.concatenate([edst, loops])
    np_n = n * k
    psrc_parts, pdst_parts = [], []
    for i in range(k):
        nxt = np.where(memb[i][esrc2], (i + 1) % k, i)
        psrc_parts.append(esrc2 * k + i)
        pdst_parts.append(edst2 * k + nxt)
    psrc = np.concatenate(psrc_parts)
    pdst = np.concatenate(pdst_parts)
    order = np.argsort(psrc, kind="stable")
    psrc, pdst = psrc[order], pdst[order]
    psucc_off = np.zeros(np_n + 1, dtype=np.int64)
    np.cumsum(np.bincount(psrc, minlength=np_n), out=psucc_off[1:])
    psucc = pdst.astype(np.int32)
    ppred_order = np.argsort(psucc, kind="stable")
    ppred = psrc.astype(np.int32)[ppred_order]
    ppred_off = np.zeros(np_n + 1, dtype=np.int64)
    np.cumsum(np.bincount(psucc, minlength=np_n), out=ppred_off[1:])

    powner = np.repeat(graph.owner_system, k).astype(np.uint8)
    F = np.zeros(np_n, dtype=np.uint8)
    last = memb[k - 1]
    F[np.flatnonzero(last) * k + (k - 1)] = 1

    active = np.repeat(safe, k).astype(np.uint8)
    env_won = np.repeat(attr_bad, k).astype(np.uint8)
    removed_stage = np.full(np_n, -1, dtype=np.int32)
    env_rank = np.full(np_n, -1, dtype=np.int32)
    in_U = np.zeros(np_n, dtype=bool)
    rankA = np.full(np_n, -1, dtype=np.int32)
    stage = 0
    while True:
        A, rankA = attractor_arrays(
            psucc_off,
            psucc,
            ppred_off,
            ppred,
            powner,
            True,
            F & active,
            active,
            np.zeros(np_n, dtype=np.uint8),
            backend=backend,
        )
        iterations += int(rankA.max()) + 1 if rankA.max() >= 0 else 0
        U = active.astype(bool) & ~A.astype(bool)
        if not U.any():
            W = active.astype(bool)
            break
        D, rankD = attractor_arrays(
            psucc_off,
            psucc,
            ppred_off,
            ppred,
            powner,
            False,
            U.astype(np.uint8),
            active,
            env_won,
            backend=backend,
        )
        iterations += int(rankD.max()) + 1 if rankD.max() >= 0 else 0
        newly = D.astype(bool) & active.astype(bool)
        removed_stage[newly] = stage
        env_rank[newly] = rankD[newly]
        in_U |= U
        active = (active.astype(bool) & ~newly).astype(np.uint8)
        env_won = (env_won.astype(bool) | newly).astype(np.uint8)
        stage += 1

    p0 = graph.init_index * k + 0
    win = bool(W[p0])
    verdict = Verdict(
        winner=SYSTEM if win else ENVIRONMENT,
        states=graph.n,
        iterations=iterations,
        ms=(time.perf_counter() - t0) * 1000.0,
    )
    sys_region = W[np.arange(n) * k]  # counter start is irrelevant to winning
    sol = Solution(
        verdict,
        graph,
        "recurrence",
        data={
            "sys_region": sys_region,
            "W": W,
            "k": k,
            "memb": memb,
            "removed_stage": removed_stage,
            "env_rank": env_rank,
            "in_U": in_U,
            "attr_bad": attr_bad,
            "rank_bad": rank_bad,
            "set_names": set_names,
        },
    )
    if win:
        def psucc_of(p: int):
            return (int(q) for q in psucc[psucc_off[p] : psucc_off[p + 1]])

        choice: dict[int, int] = {}
        wsys = np.flatnonzero(W & (powner == 1))
        for p in wsys:
            p = int(p)
            if graph.term[p // k] != 0:
                continue
            choice[p] = _best_choice(p, psucc_of, rankA, W)
        sol.strategy = Strategy(graph, "recurrence", k, memb, choice, p0)
    return sol


def solve(graph: GameGraph, backend: str | None = None) -> Solution:
    if graph.cfg.variant == Variant.COP_PURSUIT:
        return solve_reachability(graph, backend=backend)
    if graph.cfg.variant == Variant.CLASSIC_PURSUIT:
        return solve_safety(graph, backend=backend)
    return solve_generalized_buchi(graph, backend=backend)


def spoiler_choice(sol: Solution, state_idx: int, rr: int = 0) -> int | None:
    """Environment's best successor at an environment-owned state.

    Where the environment wins this returns a move that keeps winning;
    elsewhere None (caller falls back to a heuristic).  For the recurrence
    objective the choice lives on the product, keyed by the caller's
    round-robin index.
    """
    g = sol.graph
    succs = [int(v) for v in g.successors(state_idx)]
    if not succs:
        return None
    if sol.objective == "reachability":
        attr = sol.data["sys_region"]
        if attr[state_idx]:
            return None
        for v in succs:
            if not attr[v]:
                return v
        return None
    if sol.objective == "safety":
        attr_bad, rank = sol.data["attr_bad"], sol.data["rank_bad"]
        if not attr_bad[state_idx]:
            return None
        best, best_rank = None, None
        for v in succs:
            if attr_bad[v] and rank[v] >= 0 and (best_rank is None or rank[v] < best_rank):
                best, best_rank = v, rank[v]
        return best
    k = sol.data["k"]
    memb = sol.data["memb"]
    p = state_idx * k + rr
    stage = sol.data["removed_stage"]
    env_rank = sol.data["env_rank"]
    in_U = sol.data["in_U"]
    attr_bad, rank_bad = sol.data["attr_bad"], sol.data["rank_bad"]
    if attr_bad[state_idx]:
        best, best_rank = None, None
        for v in succs:
            if attr_bad[v] and (best_rank is None or rank_bad[v] < best_rank):
                best, best_rank = v, rank_bad[v]
        return best
    j = stage[p]
    if j < 0:
        return None
    i = rr
    if memb[i][state_idx]:
        i = (i + 1) % k
    # inside the removal attractor: head for its recurrence-free core,
    # then stay among states removed no later
    best, best_key = None, None
    for v in succs:
        q = v * k + i
        if attr_bad[v]:
            key = (-1, 0)
        elif stage[q] < 0:
            continue
        elif stage[q] < j:
            key = (0, 0)
        elif stage[q] == j and in_U[p] and in_U[q]:
            key = (0, 1)
        elif stage[q] == j and not in_U[p] and (in_U[q] or env_rank[q] < env_rank[p]):
            key = (0, 2 if in_U[q] else 3)
        else:
            continue
        if best_key is None or key < best_key:
            best, best_key = v, key
    return best
