"""Playouts, adversary policies, trace files, and receding-horizon play."""

import pytest

import gridpursuit as gp
from gridpursuit.arena import (
    DEFAULT_TILING,
    OPEN,
    WALL,
    Arena,
    Coord,
    extract_window,
)
from gridpursuit.errors import IllegalMoveError, MalformedTraceError, ScenarioError
from gridpursuit.game import GameConfig, GameState, JointMove, MoveRule, Team, Variant
from gridpursuit.monitors import check_trace
from gridpursuit.sim import (
    GreedyDistance,
    Optimal,
    RandomLegal,
    Scripted,
    Trace,
    receding_horizon_play,
    run_playout,
    summarize,
)

from conftest import PATH_MAP, SHUTTLE_MAP, solve_scenario

R, C = Team.ROBBERS, Team.COPS


def path_setup():
    arena, cops, robbers = gp.parse_arena(PATH_MAP)
    cfg = GameConfig(1, 1, C, Variant.COP_PURSUIT)
    graph, sol = solve_scenario(arena, cfg, cops, robbers)
    return arena, cfg, graph, sol


def shuttle_setup():
    arena, cops, robbers = gp.parse_arena(SHUTTLE_MAP)
    cfg = GameConfig(1, 1, R, Variant.SAFE_ZONE_LIVENESS, move_rule=MoveRule.ALLOW_STAY)
    graph, sol = solve_scenario(arena, cfg, cops, robbers)
    return arena, cfg, graph, sol


# -- adversary policies -----------------------------------------------------


def test_random_legal_is_seed_deterministic():
    arena, cfg, graph, sol = shuttle_setup()
    t1 = run_playout(arena, cfg, sol.strategy, RandomLegal(11), max_steps=400)
    t2 = run_playout(arena, cfg, sol.strategy, RandomLegal(11), max_steps=400)
    assert t1.states == t2.states
    assert t1.moves == t2.moves
    t3 = run_playout(arena, cfg, sol.strategy, RandomLegal(12), max_steps=400)
    assert t1.states != t3.states  # a different seed takes a different walk


def test_greedy_cop_closes_the_gap():
    arena, cops, robbers = gp.parse_arena("C...R")
    cfg = GameConfig(1, 1, C, Variant.COP_PURSUIT, first_mover="system")
    state = gp.initial_state(arena, cfg, cops, robbers)
    mv = GreedyDistance().joint_move(arena, cfg, state)
    assert mv.destinations == (Coord(1, 0),)


def test_greedy_robber_widens_the_gap():
    arena, cops, robbers = gp.parse_arena("C..R.")
    cfg = GameConfig(1, 1, C, Variant.COP_PURSUIT)
    state = gp.initial_state(arena, cfg, cops, robbers)
    mv = GreedyDistance().joint_move(arena, cfg, state)
    assert mv.destinations == (Coord(4, 0),)


def test_scripted_rejects_illegal_moves():
    arena, cops, robbers = gp.parse_arena("CR.")
    cfg = GameConfig(1, 1, C, Variant.COP_PURSUIT)
    graph, sol = solve_scenario(arena, cfg, cops, robbers)
    bad = Scripted([JointMove(R, (Coord(0, 0),))])  # onto the adjacent cop
    with pytest.raises(IllegalMoveError, match="RobberOntoCop"):
        run_playout(arena, cfg, sol.strategy, bad, max_steps=10)


def test_scripted_exhaustion_ends_the_playout():
    arena, cfg, graph, sol = path_setup()
    trace = run_playout(arena, cfg, sol.strategy, Scripted([]), max_steps=10)
    assert trace.moves == []
    assert len(trace.states) == 1


def test_strategy_team_must_match():
    arena, cfg, _, _ = path_setup()
    _, _, _, zsol = shuttle_setup()
    with pytest.raises(ScenarioError, match="different team"):
        run_playout(arena, cfg, zsol.strategy, RandomLegal(0))


# -- playouts on the path and the shuttle -----------------------------------


@pytest.mark.parametrize("adv", [RandomLegal(7), GreedyDistance(), None])
def test_path_capture_within_two_cop_moves(adv):
    arena, cfg, graph, sol = path_setup()
    adversary = adv if adv is not None else Optimal(sol)
    trace = run_playout(arena, cfg, sol.strategy, adversary)
    assert gp.is_capture(arena, trace.states[-1])
    assert len([m for m in trace.moves if m.team == C]) <= 2
    assert summarize(arena, cfg, trace)["outcome"] == "capture"


def test_path_capture_against_every_adversary_tree():
    """Walk every environment branch under the controller: all end captured."""
    arena, cfg, graph, sol = path_setup()
    strategy = sol.strategy

    def worst(p, seen):
        s = strategy.base(p)
        if graph.term[s] != 0:
            assert graph.terminal_winner(s) == C
            return 0
        assert p not in seen, "a branch loops without capture"
        if graph.owner_system[s]:
            return 1 + worst(strategy.choice[p], seen | {p})
        return max(
            worst(strategy.advance(p, int(v)), seen | {p})
            for v in graph.successors(s)
        )

    assert worst(strategy.q0, frozenset()) <= 2


def test_shuttle_lasso_against_optimal():
    arena, cfg, graph, sol = shuttle_setup()
    trace = run_playout(arena, cfg, sol.strategy, Optimal(sol))
    assert trace.cycle_start == 6
    assert len(trace.moves) == 30
    assert len(trace.states) == 31
    assert trace.states[-1] == trace.states[trace.cycle_start]
    verdict = check_trace(arena, cfg, trace.states, cycle_start=trace.cycle_start)
    assert verdict.clean
    assert verdict.liveness == "satisfied"
    assert verdict.zone_entries == {(0, 1): 1, (0, 2): 1}


def test_no_lasso_flag_for_stateful_adversaries():
    arena, cfg, graph, sol = shuttle_setup()
    trace = run_playout(arena, cfg, sol.strategy, RandomLegal(0), max_steps=200)
    assert trace.cycle_start is None
    assert len(trace.moves) == 200


def test_shuttle_random_long_run_zone_visits():
    arena, cfg, graph, sol = shuttle_setup()
    trace = run_playout(arena, cfg, sol.strategy, RandomLegal(0), max_steps=10_000)
    report = summarize(arena, cfg, trace)
    assert report["outcome"] == "max_steps"
    assert report["captures"] == 0
    assert report["zoneVisits"] == {"r0z1": 417, "r0z2": 416}


def test_robbers_stuck_outcome():
    arena, cops, robbers = gp.parse_arena("CR")
    cfg = GameConfig(1, 1, C, Variant.COP_PURSUIT)
    graph, sol = solve_scenario(arena, cfg, cops, robbers)
    trace = run_playout(arena, cfg, sol.strategy, GreedyDistance())
    assert summarize(arena, cfg, trace)["outcome"] == "robbers_stuck"
    assert trace.moves == []


# -- trace files --------------------------------------------------------------


def test_trace_roundtrip_with_lasso(tmp_path):
    arena, cfg, graph, sol = shuttle_setup()
    trace = run_playout(arena, cfg, sol.strategy, Optimal(sol))
    p = tmp_path / "lasso.jsonl"
    trace.save(p)
    again = Trace.load(p)
    assert again.states == trace.states
    assert again.moves == trace.moves
    assert again.cycle_start == trace.cycle_start


def test_trace_cycle_start_must_be_last(tmp_path):
    p = tmp_path / "bad.jsonl"
    state = GameState(cops=(Coord(0, 0),), robbers=(Coord(2, 0),), turn=R)
    lines = ['{"cycleStart": 0}', __import__("json").dumps(state.to_json())]
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(MalformedTraceError, match="final line"):
        Trace.load(p)


def test_trace_rejects_junk_lines(tmp_path):
    p = tmp_path / "junk.jsonl"
    p.write_text("not json\n")
    with pytest.raises(MalformedTraceError):
        Trace.load(p)


# -- receding horizon on the tiled plane --------------------------------------


def test_window_must_fit_the_margin():
    cfg = GameConfig(1, 1, C, Variant.COP_PURSUIT)
    with pytest.raises(ScenarioError, match="margin"):
        receding_horizon_play(
            DEFAULT_TILING, cfg, window_size=3, replan_margin=2, max_steps=1,
            cops=[(4, 4)], robbers=[(6, 6)],
        )


def seal(arena, plane_cell, kinds):
    """Stamp walls on the eight neighbors of a plane cell, if in window."""
    ox, oy = arena.origin
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx == dy == 0:
                continue
            x, y = plane_cell[0] - ox + dx, plane_cell[1] - oy + dy
            if 0 <= x < arena.width and 0 <= y < arena.height:
                kinds[y * arena.width + x] = WALL


def test_receding_horizon_shuttle_with_injected_zones():
    """A sealed-off cop and per-window zones: the robber shuttles forever."""
    z1, z2, cop_cell = (49, 49), (51, 51), (47, 47)

    def hook(win):
        kinds = list(win.kinds)
        ox, oy = win.origin
        seal(win, cop_cell, kinds)
        for cell, kind in ((z1, 1), (z2, 2), (cop_cell, OPEN), ((50, 50), OPEN)):
            kinds[(cell[1] - oy) * win.width + (cell[0] - ox)] = kind
        return Arena.grid(win.width, win.height, kinds, win.connectivity,
                          origin=win.origin)

    cfg = GameConfig(1, 1, R, Variant.SAFE_ZONE_LIVENESS, move_rule=MoveRule.ALLOW_STAY)
    trace, windows = receding_horizon_play(
        DEFAULT_TILING, cfg, window_size=9, max_steps=60,
        cops=[cop_cell], robbers=[(50, 50)], window_hook=hook,
    )
    assert len(trace.moves) == 60  # nothing ever ends the shuttle
    assert len(windows) == 1  # the compliant loop never trips the margin
    run = windows[0]
    assert run.verdict.winner == "system"
    assert run.verdict.window_relative
    verdict = check_trace(run.arena, cfg, run.states)
    assert verdict.clean
    visits1 = sum(1 for s in trace.states if s.robbers[0] == z1)
    visits2 = sum(1 for s in trace.states if s.robbers[0] == z2)
    assert visits1 >= 3 and visits2 >= 3


def test_receding_horizon_saturated_window_equals_single_solve():
    """A walled pocket inside the window: one solve, identical play."""
    lo, hi = 46, 54  # pocket boundary ring in plane coordinates

    def hook(win):
        kinds = list(win.kinds)
        ox, oy = win.origin
        for x in range(win.width):
            for y in range(win.height):
                px, py = x + ox, y + oy
                if px in (lo, hi) and lo <= py <= hi:
                    kinds[y * win.width + x] = WALL
                elif py in (lo, hi) and lo <= px <= hi:
                    kinds[y * win.width + x] = WALL
        return Arena.grid(win.width, win.height, kinds, win.connectivity,
                          origin=win.origin)

    cfg = GameConfig(1, 1, C, Variant.COP_PURSUIT)
    cops, robbers = [(48, 48)], [(52, 52)]
    trace, windows = receding_horizon_play(
        DEFAULT_TILING, cfg, window_size=17, max_steps=200,
        cops=cops, robbers=robbers, window_hook=hook,
    )
    assert len(windows) == 1
    run = windows[0]

    # the same window solved once, standalone, plays out identically
    win = hook(extract_window(DEFAULT_TILING, Coord(48, 48), 17))
    init = gp.initial_state(win, cfg,
                            [(48 - win.origin.x, 48 - win.origin.y)],
                            [(52 - win.origin.x, 52 - win.origin.y)])
    graph = gp.build_game_graph(win, cfg, init)
    sol = gp.solve(graph)
    assert sol.verdict.winner == run.verdict.winner
    assert sol.verdict.states == run.verdict.states
    single = run_playout(win, cfg, sol.strategy, Optimal(sol), max_steps=200)
    assert single.states == run.states


def test_receding_horizon_checkerboard_chase():
    """Open checkerboard region: the robber outruns a cop, windows roll on."""
    cfg = GameConfig(1, 1, C, Variant.COP_PURSUIT)
    trace, windows = receding_horizon_play(
        DEFAULT_TILING, cfg, window_size=9, max_steps=120,
        cops=[(4, 4)], robbers=[(6, 6)],
    )
    assert len(windows) == 54
    assert windows[-1].arena.width == 21  # growth settles once the gap is fixed
    assert all(w.verdict.window_relative for w in windows)
    assert not gp.is_capture(windows[-1].arena, windows[-1].states[-1])
    assert windows[-1].verdict.winner == "environment"  # the escape is permanent
    for w in windows:
        verdict = check_trace(w.arena, cfg, w.states)
        assert verdict.clean or verdict.captured_at is not None
        if w.verdict.winner == "environment":
            # an optimal-within-window robber is never caught in that window
            assert all(not gp.is_capture(w.arena, s) for s in w.states)
