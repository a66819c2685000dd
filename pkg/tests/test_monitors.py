"""Obligation automaton unit traces and the dense table it compiles to."""

import pytest

import gridpursuit as gp
from gridpursuit.monitors import (
    CLAUSE_EXIT_DEADLINE,
    CLAUSE_RETURN_BEFORE_ALTERNATE,
    MONITOR_START,
    ObligationState,
    ObligationTable,
    monitor_step,
)

OPEN = 0


def run(kinds, zone_count=2):
    """Step the monitor through a list of cell kinds, stop at violation."""
    st = MONITOR_START
    entries = []
    for k in kinds:
        v = monitor_step(st, k, zone_count)
        st = v.state
        if v.entered_zone:
            entries.append(v.entered_zone)
        if not v.ok:
            return st, entries
    return st, entries


class TestDeadline:
    def test_two_turns_inside_ok(self):
        st, _ = run([1, 1])
        assert st.violated is None
        assert st.inside == 2

    def test_third_turn_inside_violates(self):
        st, _ = run([1, 1, 1])
        assert st.violated == CLAUSE_EXIT_DEADLINE

    def test_third_turn_in_sibling_zone_violates(self):
        # hopping into the other zone does not reset the deadline clock
        st, _ = run([1, 1, 2])
        assert st.violated == CLAUSE_EXIT_DEADLINE

    def test_exit_resets_clock(self):
        st, _ = run([1, 1, OPEN, 2, 2, OPEN])
        assert st.violated is None


class TestAlternation:
    def test_return_to_just_left_zone_violates(self):
        st, _ = run([1, OPEN, 1])
        assert st.violated == CLAUSE_RETURN_BEFORE_ALTERNATE

    def test_other_zone_discharges(self):
        st, entries = run([1, OPEN, 2, OPEN, 1])
        assert st.violated is None
        assert entries == [1, 2, 1]

    def test_owed_set_on_exit(self):
        st, _ = run([1, OPEN])
        assert st.owed == 2 and st.last_zone == 1
        st, _ = run([2, OPEN])
        assert st.owed == 1 and st.last_zone == 2

    def test_any_other_zone_discharges_with_three_zones(self):
        st, _ = run([1, OPEN, 3, OPEN, 1], zone_count=3)
        assert st.violated is None

    def test_direct_hop_counts_as_visit(self):
        # z1 -> z2 in one move discharges nothing yet owes nothing either
        st, entries = run([1, 2, OPEN, 1])
        assert st.violated is None
        assert entries == [1, 2, 1]


class TestShuttleLasso:
    def test_compliant_shuttle(self):
        cycle = [1, OPEN, OPEN, 2, OPEN, OPEN]
        st, entries = run(cycle * 3)
        assert st.violated is None
        assert entries == [1, 2] * 3


class TestTotality:
    def test_open_forever_unchanged(self):
        st, _ = run([OPEN] * 10)
        assert st == MONITOR_START

    def test_violation_absorbing(self):
        st, _ = run([1, 1, 1])
        after = monitor_step(st, OPEN).state
        assert after == st
        after = monitor_step(st, 2).state
        assert after == st

    def test_determinism(self):
        table = ObligationTable(2)
        for st in table.states:
            for kind in range(3):
                assert monitor_step(st, kind) == monitor_step(st, kind)


class TestTable:
    def test_state_count_two_zones(self):
        # start, inside (1|2) x zone (1|2), owed (2 after 1 | 1 after 2)
        table = ObligationTable(2)
        assert table.n_valid == 7
        assert table.n_total == 9

    def test_agrees_with_step_function(self):
        for zc in (2, 3):
            table = ObligationTable(zc)
            for code, st in enumerate(table.states):
                for kind in range(zc + 1):
                    v = monitor_step(st, kind, zc)
                    assert table.next_code[code][kind] == table.code_of(v.state)
                    assert table.entered[code][kind] == v.entered_zone

    def test_violation_codes_absorb(self):
        table = ObligationTable(2)
        for code in (table.exit_deadline_code, table.return_code):
            for kind in range(3):
                assert table.next_code[code][kind] == code

    def test_code_round_trip(self):
        table = ObligationTable(2)
        for code in range(table.n_total):
            assert table.code_of(table.state_of(code)) == code

    def test_clauses(self):
        table = ObligationTable(2)
        assert table.clause_of(table.exit_deadline_code) == CLAUSE_EXIT_DEADLINE
        assert table.clause_of(table.return_code) == CLAUSE_RETURN_BEFORE_ALTERNATE
        assert table.clause_of(0) is None
        assert table.is_violation(table.n_valid)
        assert not table.is_violation(table.n_valid - 1)

    def test_json_round_trip(self):
        table = ObligationTable(2)
        for st in table.states:
            assert ObligationState.from_json(st.to_json()) == st
