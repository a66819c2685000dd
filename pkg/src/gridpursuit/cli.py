"""Command-line surface: solve, simulate, check traces, cut windows, serve.

Exit codes: 0 success (and, for solve, a system win), 10 system loses,
20 trace violation, 64 usage error, 65 malformed input, 70 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .arena import DEFAULT_TILING, EIGHT_WAY, FOUR_WAY, TilingSpec, extract_window
from .errors import (
    ArenaError,
    CapExceededError,
    MalformedTraceError,
    ScenarioError,
)
from .monitors import check_trace
from .scenario import load_scenario
from .sim import (
    GreedyDistance,
    Optimal,
    RandomLegal,
    Trace,
    knowledge_playout,
    run_playout,
    summarize,
)
from .solver import solve

EX_OK = 0
EX_SYSTEM_LOSES = 10
EX_VIOLATION = 20
EX_USAGE = 64
EX_DATA = 65
EX_CAP = 70


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gridpursuit",
        description="Solve, simulate, and serve grid pursuit games.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide a scenario and extract the controller")
    s.add_argument("--scenario", required=True, help="scenario JSON file")
    s.add_argument("--strategy", help="write the winning controller here (JSON)")
    s.add_argument("--backend", choices=["pure", "compiled"], help="solver lane")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("simulate", help="play the controller against an adversary")
    s.add_argument("--scenario", required=True, help="scenario JSON file")
    s.add_argument(
        "--adversary", choices=["optimal", "random", "greedy"], default="optimal"
    )
    s.add_argument("--seed", type=int, default=0, help="seed for the random adversary")
    s.add_argument("--steps", type=int, default=10_000, help="step budget")
    s.add_argument("--trace", help="write the recorded play here (JSON Lines)")
    s.add_argument("--backend", choices=["pure", "compiled"], help="solver lane")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("check-trace", help="replay a trace against the rules")
    s.add_argument("--trace", required=True, help="trace JSON Lines file")
    s.add_argument("--scenario", required=True, help="scenario JSON file")
    s.set_defaults(func=cmd_check_trace)

    s = sub.add_parser("gen-arena", help="cut a finite window out of a tiled plane")
    s.add_argument("--size", type=int, required=True, help="window side length (odd)")
    s.add_argument("--center", default="0,0", help="plane cell to center on, as X,Y")
    s.add_argument("--tiling", help="tiling spec JSON file (default: built-in bands)")
    s.add_argument("--connectivity", choices=["four", "eight"], default="eight")
    s.add_argument("--out", help="write the window JSON here instead of stdout")
    s.set_defaults(func=cmd_gen_arena)

    s = sub.add_parser("serve", help="serve the interactive play API")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--bind", default="127.0.0.1")
    s.add_argument("--static-dir", help="also serve this directory at /")
    s.add_argument("--debug", action="store_true", help="enable the replay-check endpoint")
    s.set_defaults(func=cmd_serve)
    return p


def cmd_solve(args) -> int:
    sc = load_scenario(args.scenario)
    graph = sc.build(backend=args.backend)
    sol = solve(graph, backend=args.backend)
    report = sol.verdict.to_json()
    report["backend"] = graph.meta.get("backend")
    print(json.dumps(report, indent=2))
    if sol.strategy is not None and args.strategy:
        Path(args.strategy).write_text(
            json.dumps(sol.strategy.to_json(), indent=2) + "\n"
        )
    return EX_OK if sol.verdict.winner == "system" else EX_SYSTEM_LOSES


def cmd_simulate(args) -> int:
    sc = load_scenario(args.scenario)
    graph = sc.build(backend=args.backend)
    sol = solve(graph, backend=args.backend)
    if sol.strategy is None:
        print(
            json.dumps(
                {"winner": sol.verdict.winner, "error": "system loses, nothing to play"}
            )
        )
        return EX_SYSTEM_LOSES
    adv = {
        "optimal": lambda: Optimal(sol),
        "random": lambda: RandomLegal(args.seed),
        "greedy": GreedyDistance,
    }[args.adversary]()
    if graph.meta.get("backend") == "knowledge":
        trace = knowledge_playout(
            sc.arena, sc.cfg, sol, sc.initial(), adv, max_steps=args.steps
        )
    else:
        trace = run_playout(sc.arena, sc.cfg, sol.strategy, adv, max_steps=args.steps)
    if args.trace:
        trace.save(args.trace)
    verdict = check_trace(sc.arena, sc.cfg, trace.states, cycle_start=trace.cycle_start)
    report = summarize(sc.arena, sc.cfg, trace)
    # the controller came from a system-winning verdict, so the trace must
    # show no violation by the system side; a capture only counts against
    # it when the system is the team that promised to avoid capture
    sys_team = sc.cfg.system_team
    bad = (
        verdict.violation_clause is not None
        and verdict.violation_team == sys_team.value
    ) or (
        sys_team.value == "robbers"
        and (verdict.captured_at is not None or verdict.liveness == "violated")
    )
    report["systemClean"] = not bad
    print(json.dumps(report, indent=2))
    return EX_VIOLATION if bad else EX_OK


def cmd_check_trace(args) -> int:
    sc = load_scenario(args.scenario)
    trace = Trace.load(args.trace)
    verdict = check_trace(sc.arena, sc.cfg, trace.states, cycle_start=trace.cycle_start)
    print(json.dumps(verdict.to_json(), indent=2))
    # captures and cornered robbers are outcomes, not rule breaches; only a
    # violated movement or zone promise makes the trace invalid
    violated = verdict.violation_clause is not None or verdict.liveness == "violated"
    return EX_VIOLATION if violated else EX_OK


def cmd_gen_arena(args) -> int:
    try:
        x, y = (int(v) for v in args.center.split(","))
    except ValueError:
        print(f"error: --center expects X,Y, got {args.center!r}", file=sys.stderr)
        return EX_USAGE
    if args.tiling:
        spec = TilingSpec.from_json(json.loads(Path(args.tiling).read_text()))
    else:
        spec = DEFAULT_TILING
    conn = FOUR_WAY if args.connectivity == "four" else EIGHT_WAY
    win = extract_window(spec, (x, y), args.size, conn)
    text = json.dumps(win.to_json(tiling=spec), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EX_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(debug=args.debug, static_dir=args.static_dir)
    uvicorn.run(app, host=args.bind, port=args.port, log_level="warning")
    return EX_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EX_OK if e.code in (0, None) else EX_USAGE
    try:
        return args.func(args)
    except (
        ScenarioError,
        ArenaError,
        MalformedTraceError,
        json.JSONDecodeError,
        FileNotFoundError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_DATA
    except CapExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_CAP


if __name__ == "__main__":
    sys.exit(main())
