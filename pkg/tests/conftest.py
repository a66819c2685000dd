"""Shared fixtures: the small regression arenas used throughout the suite."""

import pytest

import gridpursuit as gp
from gridpursuit.arena import Arena

# 1x3 path, cop on the left end, robber cornered on the right
PATH_MAP = "C.R"

# two safe zones joined by two open arcs; the wall block splits the arena
# so that a single cop confined to one arc can never cut off the shuttle
SHUTTLE_MAP = "..1..\n.###.\nC###R\n.###.\n..2.."


@pytest.fixture
def path_arena():
    return gp.parse_arena(PATH_MAP)


@pytest.fixture
def cycle4():
    return Arena.graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def shuttle():
    return gp.parse_arena(SHUTTLE_MAP)


def solve_scenario(arena, cfg, cops, robbers, backend=None):
    init = gp.initial_state(arena, cfg, cops, robbers)
    graph = gp.build_game_graph(arena, cfg, init, backend=backend)
    return graph, gp.solve(graph)
