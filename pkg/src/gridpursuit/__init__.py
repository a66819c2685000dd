"""Pursuit games on grids and graphs: solving, strategies, simulation.

The package decides who wins generalized cops-and-robbers games by
explicit-state game solving, extracts finite-memory winning controllers,
and validates them in simulation.  See the README for the CLI and the
HTTP playground.
"""

from .arena import (
    Arena,
    Coord,
    DEFAULT_TILING,
    EIGHT_WAY,
    FOUR_WAY,
    OPEN,
    TilingSpec,
    WALL,
    extract_window,
    parse_arena,
    render_arena,
    tiling_cell,
)
from .core import default_backend
from .errors import (
    ArenaError,
    CapExceededError,
    IllegalMoveError,
    MalformedTraceError,
    ScenarioError,
)
from .game import (
    GameConfig,
    GameState,
    JointMove,
    MoveRule,
    Team,
    Variant,
    apply_joint_move,
    initial_state,
    is_capture,
    legal_joint_moves,
)
from .belief import (
    BeliefState,
    InfoMode,
    KnowledgeGameSpec,
    Observation,
    build_knowledge_game,
    initial_belief,
    observe,
    track_beliefs,
    track_member_beliefs,
    update_belief,
)
from .graph import GameGraph, build_game_graph
from .monitors import ObligationState, MonitorVerdict, check_trace, monitor_step
from .oracle import brute_force_oracle, observation_strategy_search
from .scenario import Scenario, load_scenario
from .sim import (
    AdversaryPolicy,
    GreedyDistance,
    Optimal,
    RandomLegal,
    Scripted,
    Trace,
    WindowRun,
    receding_horizon_play,
    run_playout,
    summarize,
)
from .solver import (
    Solution,
    Strategy,
    Verdict,
    attractor,
    solve,
    solve_generalized_buchi,
    solve_reachability,
    solve_safety,
)

__version__ = "0.1.0"
