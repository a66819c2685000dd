"""Movement legality, capture, turn structure, and state transitions."""

import pytest

import gridpursuit as gp
from gridpursuit.arena import Arena, Coord
from gridpursuit.errors import IllegalMoveError, ScenarioError
from gridpursuit.game import (
    GameConfig,
    GameState,
    JointMove,
    MoveRule,
    Team,
    Variant,
    apply_joint_move,
    explain_illegal,
    initial_state,
    is_capture,
    legal_joint_moves,
)


def cop_pursuit(cops=1, robbers=1, **kw):
    return GameConfig(cops, robbers, Team.COPS, Variant.COP_PURSUIT, **kw)


def classic(cops=1, robbers=1, **kw):
    return GameConfig(cops, robbers, Team.ROBBERS, Variant.CLASSIC_PURSUIT, **kw)


class TestConfig:
    def test_variant_fixes_system_team(self):
        with pytest.raises(ScenarioError):
            GameConfig(1, 1, Team.ROBBERS, Variant.COP_PURSUIT)
        with pytest.raises(ScenarioError):
            GameConfig(1, 1, Team.COPS, Variant.CLASSIC_PURSUIT)
        with pytest.raises(ScenarioError):
            GameConfig(1, 1, Team.COPS, Variant.SAFE_ZONE_LIVENESS)

    def test_environment_moves_first(self):
        assert cop_pursuit().initial_turn == Team.ROBBERS
        assert classic().initial_turn == Team.COPS

    def test_system_first_override(self):
        assert cop_pursuit(first_mover="system").initial_turn == Team.COPS

    def test_team_sizes_positive(self):
        with pytest.raises(ScenarioError):
            GameConfig(0, 1, Team.COPS, Variant.COP_PURSUIT)


class TestInitialState:
    def test_counts_must_match(self, path_arena):
        a, cops, robbers = path_arena
        with pytest.raises(ScenarioError):
            initial_state(a, cop_pursuit(cops=2), cops, robbers)

    def test_safe_zone_needs_two_zones(self):
        a, cops, robbers = gp.parse_arena("C1R")
        cfg = GameConfig(1, 1, Team.ROBBERS, Variant.SAFE_ZONE_LIVENESS)
        with pytest.raises(ScenarioError):
            initial_state(a, cfg, cops, robbers)

    def test_monitors_one_per_robber(self, shuttle):
        a, cops, robbers = shuttle
        cfg = GameConfig(1, 1, Team.ROBBERS, Variant.SAFE_ZONE_LIVENESS)
        init = initial_state(a, cfg, cops, robbers)
        assert len(init.monitors) == 1

    def test_json_round_trip(self, shuttle):
        a, cops, robbers = shuttle
        cfg = GameConfig(1, 1, Team.ROBBERS, Variant.SAFE_ZONE_LIVENESS)
        init = initial_state(a, cfg, cops, robbers)
        assert GameState.from_json(init.to_json()) == init


class TestLegalMoves:
    def test_cornered_robber_is_stuck(self, path_arena):
        # classic game on the path: cop steps to the middle, robber at the
        # end may not move onto the cop and may not stay
        a, cops, robbers = path_arena
        cfg = classic()
        init = initial_state(a, cfg, cops, robbers)
        after_cop = apply_joint_move(
            a, cfg, init, JointMove(Team.COPS, (Coord(1, 0),))
        )
        assert legal_joint_moves(a, cfg, after_cop) == []

    def test_cycle_robber_has_two_moves(self, cycle4):
        cfg = classic(first_mover="system")
        init = initial_state(cycle4, cfg, [Coord(0, 0)], [Coord(2, 0)])
        moves = legal_joint_moves(cycle4, cfg, init)
        assert [m.destinations for m in moves] == [(Coord(1, 0),), (Coord(3, 0),)]

    def test_allow_stay_is_a_superset(self, cycle4):
        must = classic()
        stay = classic(move_rule=MoveRule.ALLOW_STAY)
        init = initial_state(cycle4, must, [Coord(0, 0)], [Coord(2, 0)])
        m1 = {m.destinations for m in legal_joint_moves(cycle4, must, init)}
        m2 = {m.destinations for m in legal_joint_moves(cycle4, stay, init)}
        assert m1 < m2
        assert (Coord(0, 0),) in m2 - m1

    def test_canonical_order(self):
        a, cops, robbers = gp.parse_arena("...\n.C.\n..R")
        cfg = cop_pursuit(first_mover="system")
        init = initial_state(a, cfg, cops, robbers)
        moves = legal_joint_moves(a, cfg, init)
        keys = [m.sort_key() for m in moves]
        assert keys == sorted(keys)
        # all 8 neighbours stay available: entering the robber cell captures
        assert len(moves) == 8

    def test_team_collision_pruned(self):
        a, cops, robbers = gp.parse_arena("CC.R")
        cfg = cop_pursuit(cops=2, first_mover="system")
        init = initial_state(a, cfg, cops, robbers)
        moves = legal_joint_moves(a, cfg, init)
        for m in moves:
            assert len(set(m.destinations)) == 2

    def test_swap_pruned_rotation_kept(self):
        a, cops, robbers = gp.parse_arena("CC.\nC.R")
        cfg = cop_pursuit(cops=3, first_mover="system")
        init = initial_state(a, cfg, cops, robbers)
        srcs = init.cops
        moves = {m.destinations for m in legal_joint_moves(a, cfg, init)}
        rotation = (srcs[1], srcs[2], srcs[0])
        assert rotation in moves
        swap_01 = (srcs[1], srcs[0], Coord(1, 1))
        assert swap_01 not in moves


class TestExplainIllegal:
    def setup_method(self):
        self.a, self.cops, self.robbers = gp.parse_arena("C1R\n.2.\n...")
        self.cfg = GameConfig(1, 1, Team.ROBBERS, Variant.SAFE_ZONE_LIVENESS)
        self.init = initial_state(self.a, self.cfg, self.cops, self.robbers)

    def clause(self, team, dests, state=None):
        return explain_illegal(
            self.a, self.cfg, state or self.init, JointMove(team, tuple(dests))
        )

    def test_wrong_turn(self):
        assert self.clause(Team.ROBBERS, [Coord(2, 1)]) == "WrongTurn"

    def test_wrong_arity(self):
        assert self.clause(Team.COPS, [Coord(0, 1), Coord(1, 2)]) == "WrongArity"

    def test_off_board(self):
        assert self.clause(Team.COPS, [Coord(-1, 0)]) == "CollideWithWall"

    def test_wall(self):
        a, cops, robbers = gp.parse_arena("C#R\n...")
        cfg = classic(first_mover="system")
        init = initial_state(a, cfg, cops, robbers)
        assert (
            explain_illegal(a, cfg, init, JointMove(Team.ROBBERS, (Coord(1, 0),)))
            == "CollideWithWall"
        )

    def test_stayed_put(self):
        assert self.clause(Team.COPS, [Coord(0, 0)]) == "StayedPut"

    def test_not_adjacent(self):
        assert self.clause(Team.COPS, [Coord(0, 2)]) == "NotAdjacent"

    def test_cop_in_safe_zone(self):
        assert self.clause(Team.COPS, [Coord(1, 0)]) == "CopInSafeZone"

    def test_robber_onto_cop(self):
        a, cops, robbers = gp.parse_arena("C.R")
        cfg = classic(first_mover="system")
        init = initial_state(a, cfg, cops, robbers)
        mid = apply_joint_move(a, cfg, init, JointMove(Team.ROBBERS, (Coord(1, 0),)))
        assert (
            explain_illegal(a, cfg, mid, JointMove(Team.COPS, (Coord(1, 0),))) is None
        )  # cops MAY enter: that is the capture
        back = initial_state(a, cfg, [Coord(1, 0)], [Coord(2, 0)])
        assert (
            explain_illegal(
                a, classic(), back, JointMove(Team.ROBBERS, (Coord(1, 0),))
            )
            == "RobberOntoCop"
        )

    def test_cops_collide(self):
        a, cops, robbers = gp.parse_arena("C.C\n.R.")
        cfg = cop_pursuit(cops=2, first_mover="system")
        init = initial_state(a, cfg, cops, robbers)
        assert (
            explain_illegal(
                a, cfg, init, JointMove(Team.COPS, (Coord(1, 0), Coord(1, 0)))
            )
            == "CopsCollide"
        )

    def test_cops_switch(self):
        a, cops, robbers = gp.parse_arena("CC\nR.")
        cfg = cop_pursuit(cops=2, first_mover="system")
        init = initial_state(a, cfg, cops, robbers)
        assert (
            explain_illegal(
                a, cfg, init, JointMove(Team.COPS, (cops[1], cops[0]))
            )
            == "CopsSwitch"
        )

    def test_robbers_switch(self):
        a, cops, robbers = gp.parse_arena("RR\nC.")
        cfg = classic(robbers=2, first_mover="system")
        init = initial_state(a, cfg, cops, robbers)
        assert (
            explain_illegal(
                a, cfg, init, JointMove(Team.ROBBERS, (robbers[1], robbers[0]))
            )
            == "RobbersSwitch"
        )

    def test_legal_move_returns_none(self):
        assert self.clause(Team.COPS, [Coord(0, 1)]) is None


class TestApply:
    def test_turn_flips(self, path_arena):
        a, cops, robbers = path_arena
        cfg = classic()
        init = initial_state(a, cfg, cops, robbers)
        after = apply_joint_move(a, cfg, init, JointMove(Team.COPS, (Coord(1, 0),)))
        assert after.turn == Team.ROBBERS
        assert after.cops == (Coord(1, 0),)
        assert after.robbers == init.robbers

    def test_illegal_raises_with_clause(self, path_arena):
        a, cops, robbers = path_arena
        cfg = classic()
        init = initial_state(a, cfg, cops, robbers)
        with pytest.raises(IllegalMoveError) as err:
            apply_joint_move(a, cfg, init, JointMove(Team.COPS, (Coord(0, 0),)))
        assert err.value.clause == "StayedPut"

    def test_monitor_advances_on_robber_move_only(self, shuttle):
        a, cops, robbers = shuttle
        cfg = GameConfig(1, 1, Team.ROBBERS, Variant.SAFE_ZONE_LIVENESS)
        init = initial_state(a, cfg, cops, robbers)  # cops move first
        after_cop = apply_joint_move(a, cfg, init, JointMove(Team.COPS, (Coord(0, 1),)))
        assert after_cop.monitors == init.monitors
        after_rob = apply_joint_move(
            a, cfg, after_cop, JointMove(Team.ROBBERS, (Coord(4, 1),))
        )
        assert after_rob.monitors == init.monitors  # open cell, no change
        zoneward = apply_joint_move(
            a, cfg, after_rob, JointMove(Team.COPS, (Coord(0, 0),))
        )
        entered = apply_joint_move(
            a, cfg, zoneward, JointMove(Team.ROBBERS, (Coord(3, 0),))
        )
        assert entered.monitors[0].inside == 0  # still open
        cop_back = apply_joint_move(a, cfg, entered, JointMove(Team.COPS, (Coord(0, 1),)))
        in_zone = apply_joint_move(
            a, cfg, cop_back, JointMove(Team.ROBBERS, (Coord(2, 0),))
        )
        assert in_zone.monitors[0].inside == 1
        assert in_zone.monitors[0].last_zone == 1

    def test_classic_variant_keeps_monitors_empty(self, path_arena):
        a, cops, robbers = path_arena
        cfg = classic()
        init = initial_state(a, cfg, cops, robbers)
        assert all(m == init.monitors[0] for m in init.monitors)
        after = apply_joint_move(a, cfg, init, JointMove(Team.COPS, (Coord(1, 0),)))
        assert after.monitors == init.monitors


class TestCapture:
    def test_shared_cell_is_capture(self):
        a, _, _ = gp.parse_arena("C.R")
        s = GameState((Coord(1, 0),), (Coord(1, 0),), Team.ROBBERS)
        assert is_capture(a, s)

    def test_zone_cell_grants_immunity(self):
        a, _, _ = gp.parse_arena("C1R\n.2.")
        s = GameState((Coord(1, 0),), (Coord(1, 0),), Team.ROBBERS)
        assert not is_capture(a, s)

    def test_distinct_cells_no_capture(self):
        a, _, _ = gp.parse_arena("C.R")
        s = GameState((Coord(0, 0),), (Coord(2, 0),), Team.COPS)
        assert not is_capture(a, s)
