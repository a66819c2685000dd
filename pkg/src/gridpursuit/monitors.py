"""Safe-zone obligation automata and offline trace checking.

Each robber carries one obligation monitor.  The monitor watches the kind
of the cell the robber occupies after each of its own moves and enforces
two promises: a robber inside a safe zone must leave within two of its
turns, and after leaving zone z it must visit a different zone before
re-entering z.  Violations are absorbing; clause names identify which
promise broke.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arena import OPEN
from .errors import MalformedTraceError

CLAUSE_EXIT_DEADLINE = "ExitDeadline"
CLAUSE_RETURN_BEFORE_ALTERNATE = "ReturnBeforeAlternate"
CLAUSE_WALL_COLLISION = "WallCollision"
CLAUSE_TEAM_COLLISION = "TeamCollision"
CLAUSE_TEAM_SWAP = "TeamSwap"
CLAUSE_STAYED_PUT = "StayedPut"

MONITOR_CLAUSES = (CLAUSE_EXIT_DEADLINE, CLAUSE_RETURN_BEFORE_ALTERNATE)


@dataclass(frozen=True)
class ObligationState:
    """One robber's standing with respect to the safe-zone promises.

    owed       zone that must come next, 0 if no visit is owed
    inside     consecutive own turns spent in the current zone (0..2)
    last_zone  zone most recently occupied, 0 if never in a zone
    violated   clause name once a promise broke (absorbing), else None
    """

    owed: int = 0
    inside: int = 0
    last_zone: int = 0
    violated: str | None = None

    def to_json(self) -> dict:
        data = {"owed": self.owed, "inside": self.inside, "last": self.last_zone}
        if self.violated:
            data["violated"] = self.violated
        return data

    @classmethod
    def from_json(cls, data: dict) -> "ObligationState":
        return cls(
            owed=data.get("owed", 0),
            inside=data.get("inside", 0),
            last_zone=data.get("last", 0),
            violated=data.get("violated"),
        )


MONITOR_START = ObligationState()


@dataclass(frozen=True)
class MonitorVerdict:
    state: ObligationState
    entered_zone: int = 0  # zone id when this step was a fresh zone entry

    @property
    def ok(self) -> bool:
        return self.state.violated is None

    @property
    def clause(self) -> str | None:
        return self.state.violated


def monitor_step(state: ObligationState, cell_kind: int, zone_count: int = 2) -> MonitorVerdict:
    """Advance one monitor by one robber move onto a cell of ``cell_kind``.

    Deterministic and total; wall kinds are treated as off-zone here (the
    trace checker reports wall entry separately).  ``zone_count`` fixes
    which zone becomes owed after an exit: the smallest zone other than
    the one just left.
    """
    if state.violated is not None:
        return MonitorVerdict(state)
    if cell_kind > 0:
        z = cell_kind
        if state.inside > 0:
            # the deadline counts consecutive in-zone turns no matter the
            # zone: hopping straight into a sibling zone does not reset it
            if state.inside >= 2:
                return MonitorVerdict(ObligationState(violated=CLAUSE_EXIT_DEADLINE))
            if z == state.last_zone:
                return MonitorVerdict(ObligationState(0, state.inside + 1, z))
            return MonitorVerdict(
                ObligationState(0, state.inside + 1, z), entered_zone=z
            )
        if state.owed and z == state.last_zone:
            return MonitorVerdict(
                ObligationState(violated=CLAUSE_RETURN_BEFORE_ALTERNATE)
            )
        return MonitorVerdict(ObligationState(0, 1, z), entered_zone=z)
    if state.inside > 0:
        # just exited: an alternate zone is now owed before returning
        owed = 1 if state.last_zone != 1 else min(2, zone_count)
        return MonitorVerdict(ObligationState(owed, 0, state.last_zone))
    return MonitorVerdict(state)


class ObligationTable:
    """Reachable monitor states enumerated into a dense transition table.

    Codes 0..n_valid-1 are live states (0 is the start state); the last two
    codes are the absorbing ExitDeadline and ReturnBeforeAlternate states.
    ``next_code[m][kind]`` advances code m by a move onto cell kind
    (0 = off-zone, z = zone z).  Graph builders index this table rather
    than re-deriving the step function.
    """

    def __init__(self, zone_count: int):
        self.zone_count = zone_count
        states = [MONITOR_START]
        index = {MONITOR_START: 0}
        frontier = [MONITOR_START]
        while frontier:
            st = frontier.pop()
            for kind in range(zone_count + 1):
                nxt = monitor_step(st, kind, zone_count).state
                if nxt.violated is None and nxt not in index:
                    index[nxt] = len(states)
                    states.append(nxt)
                    frontier.append(nxt)
        self.n_valid = len(states)
        self.exit_deadline_code = self.n_valid
        self.return_code = self.n_valid + 1
        self.n_total = self.n_valid + 2
        self.states = states
        self.index = index
        self.next_code = []
        self.entered = []
        for code, st in enumerate(states):
            row, ent = [], []
            for kind in range(zone_count + 1):
                v = monitor_step(st, kind, zone_count)
                if v.state.violated == CLAUSE_EXIT_DEADLINE:
                    row.append(self.exit_deadline_code)
                elif v.state.violated == CLAUSE_RETURN_BEFORE_ALTERNATE:
                    row.append(self.return_code)
                else:
                    row.append(index[v.state])
                ent.append(v.entered_zone)
            self.next_code.append(row)
            self.entered.append(ent)
        # violation codes absorb
        for _ in range(2):
            self.next_code.append([len(self.next_code)] * (zone_count + 1))
            self.entered.append([0] * (zone_count + 1))

    def code_of(self, state: ObligationState) -> int:
        if state.violated == CLAUSE_EXIT_DEADLINE:
            return self.exit_deadline_code
        if state.violated == CLAUSE_RETURN_BEFORE_ALTERNATE:
            return self.return_code
        return self.index[state]

    def state_of(self, code: int) -> ObligationState:
        if code == self.exit_deadline_code:
            return ObligationState(violated=CLAUSE_EXIT_DEADLINE)
        if code == self.return_code:
            return ObligationState(violated=CLAUSE_RETURN_BEFORE_ALTERNATE)
        return self.states[code]

    def is_violation(self, code: int) -> bool:
        return code >= self.n_valid

    def clause_of(self, code: int) -> str | None:
        if code == self.exit_deadline_code:
            return CLAUSE_EXIT_DEADLINE
        if code == self.return_code:
            return CLAUSE_RETURN_BEFORE_ALTERNATE
        return None


@dataclass
class TraceVerdict:
    """Outcome of replaying a recorded trace against the movement rules."""

    clean: bool
    violation_step: int | None = None
    violation_clause: str | None = None
    violation_team: str | None = None
    captured_at: int | None = None
    stuck_team: str | None = None
    liveness: str = "undetermined"  # "satisfied" | "violated" | "undetermined"
    zone_entries: dict = field(default_factory=dict)  # (robber, zone) -> count in cycle

    def to_json(self) -> dict:
        return {
            "clean": self.clean,
            "violationStep": self.violation_step,
            "violationClause": self.violation_clause,
            "violationTeam": self.violation_team,
            "capturedAt": self.captured_at,
            "stuckTeam": self.stuck_team,
            "liveness": self.liveness,
            "zoneEntries": {f"r{r}z{z}": c for (r, z), c in self.zone_entries.items()},
        }


def check_trace(arena, cfg, states, cycle_start: int | None = None) -> TraceVerdict:
    """Replay a trace offline and report the first violated promise.

    ``states`` is a sequence of GameStates; consecutive states must differ
    by one legal-shaped joint move of the team to move (anything a move
    could never produce raises MalformedTraceError, e.g. teleports or a
    move by the wrong team).  Rule breaches that a bad controller *could*
    produce are reported as violations with 1-based step indices.  When
    ``cycle_start`` marks a lasso (the final state repeats the state at
    that index), the recurrence obligations are decided on the cycle:
    every robber must enter every zone within it.
    """
    from .game import Team, MoveRule, Variant, is_capture, legal_joint_moves

    if not states:
        raise MalformedTraceError("empty trace")
    zone_count = arena.zone_count
    verdict = TraceVerdict(clean=True)
    entries_total: dict = {}
    entry_steps: list[tuple[int, int, int]] = []  # (step, robber, zone)

    def fail(step: int, clause: str, team: Team) -> TraceVerdict:
        verdict.clean = False
        verdict.violation_step = step
        verdict.violation_clause = clause
        verdict.violation_team = team.value
        return verdict

    monitors = list(states[0].monitors)
    for step, (s, t) in enumerate(zip(states, states[1:]), start=1):
        if is_capture(arena, s):
            raise MalformedTraceError(f"moves continue after capture at step {step - 1}")
        team = s.turn
        movers = s.cops if team == Team.COPS else s.robbers
        dests = t.cops if team == Team.COPS else t.robbers
        frozen = t.robbers if team == Team.COPS else t.cops
        frozen_src = s.robbers if team == Team.COPS else s.cops
        if frozen != frozen_src:
            raise MalformedTraceError(f"non-moving team changed at step {step}")
        if t.turn == s.turn or len(dests) != len(movers):
            raise MalformedTraceError(f"turn did not alternate at step {step}")
        for src, dst in zip(movers, dests):
            if dst != src and not arena.adjacent_shape(src, dst):
                raise MalformedTraceError(
                    f"non-adjacent move {tuple(src)}->{tuple(dst)} at step {step}"
                )
        for src, dst in zip(movers, dests):
            if arena.kind_at(dst) == -1:
                return fail(step, CLAUSE_WALL_COLLISION, team)
            if dst == src and cfg.move_rule == MoveRule.MUST_MOVE:
                return fail(step, CLAUSE_STAYED_PUT, team)
        if len(set(dests)) != len(dests):
            return fail(step, CLAUSE_TEAM_COLLISION, team)
        for i in range(len(movers)):
            for j in range(i + 1, len(movers)):
                if dests[i] == movers[j] and dests[j] == movers[i]:
                    return fail(step, CLAUSE_TEAM_SWAP, team)
        if team == Team.ROBBERS and cfg.variant == Variant.SAFE_ZONE_LIVENESS:
            new_monitors = []
            for r, (mon, dst) in enumerate(zip(monitors, dests)):
                v = monitor_step(mon, max(arena.kind_at(dst), 0), zone_count)
                if not v.ok:
                    return fail(step, v.clause, team)
                if v.entered_zone:
                    entries_total[(r, v.entered_zone)] = (
                        entries_total.get((r, v.entered_zone), 0) + 1
                    )
                    entry_steps.append((step, r, v.entered_zone))
                new_monitors.append(v.state)
            monitors = new_monitors
        if is_capture(arena, t):
            verdict.captured_at = step
            verdict.clean = False
            if step != len(states) - 1:
                raise MalformedTraceError(f"moves continue after capture at step {step}")
            return verdict

    final = states[-1]
    if not is_capture(arena, final) and not legal_joint_moves(arena, cfg, final):
        verdict.stuck_team = final.turn.value
        if final.turn == Team.ROBBERS:
            verdict.captured_at = len(states)  # cornered: counts as caught
            verdict.clean = False
        return verdict

    if cycle_start is not None:
        if not (0 <= cycle_start < len(states) - 1):
            raise MalformedTraceError(f"cycleStart {cycle_start} out of range")
        if states[-1] != states[cycle_start]:
            raise MalformedTraceError("cycleStart state does not equal the final state")
        if cfg.variant == Variant.SAFE_ZONE_LIVENESS:
            in_cycle = {
                (r, z) for (step, r, z) in entry_steps if step > cycle_start
            }
            need = {
                (r, z)
                for r in range(len(states[0].robbers))
                for z in range(1, zone_count + 1)
            }
            verdict.liveness = "satisfied" if need <= in_cycle else "violated"
            verdict.zone_entries = {
                (r, z): sum(
                    1 for (step, rr, zz) in entry_steps if step > cycle_start and (rr, zz) == (r, z)
                )
                for (r, z) in sorted(need)
            }
            if verdict.liveness == "violated":
                verdict.clean = False
    return verdict
