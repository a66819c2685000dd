"""Compare the compiled and pure solver lanes on growing open grids.

Builds and solves the same cop-pursuit scenario with both backends and
prints wall times plus the speedup.  The two lanes must agree on the
verdict; disagreement aborts the run.

Usage: python benchmarks/compare_backends.py [--sides 6 8 10] [--cops 1]
"""

import argparse
import time

import gridpursuit as gp
from gridpursuit.game import GameConfig, Team, Variant


def scenario(side: int, cops: int):
    rows = [["."] * side for _ in range(side)]
    rows[0][0] = "C"
    if cops == 2:
        rows[side - 1][0] = "C"
    rows[side - 1][side - 1] = "R"
    arena, cop_pos, rob_pos = gp.parse_arena("\n".join("".join(r) for r in rows))
    cfg = GameConfig(cops, 1, Team.COPS, Variant.COP_PURSUIT)
    init = gp.initial_state(arena, cfg, cop_pos, rob_pos)
    return arena, cfg, init


def run_lane(arena, cfg, init, backend: str, repeat: int):
    best_build = best_solve = float("inf")
    winner, n, m = None, 0, 0
    for _ in range(repeat):
        t0 = time.perf_counter()
        g = gp.build_game_graph(arena, cfg, init, backend=backend)
        t1 = time.perf_counter()
        sol = gp.solve(g, backend=backend)
        t2 = time.perf_counter()
        best_build = min(best_build, t1 - t0)
        best_solve = min(best_solve, t2 - t1)
        winner, n, m = sol.verdict.winner, g.n, g.m
    return best_build, best_solve, winner, n, m


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sides", type=int, nargs="+", default=[6, 8, 10, 12])
    ap.add_argument("--cops", type=int, choices=(1, 2), default=1)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if gp.default_backend() != "compiled":
        print("note: compiled extension not built; both lanes run pure")

    header = (
        f"{'grid':>6} {'states':>9} {'edges':>10} "
        f"{'pure build':>11} {'pure solve':>11} "
        f"{'ext build':>10} {'ext solve':>10} {'speedup':>8}"
    )
    print(header)
    print("-" * len(header))
    for side in args.sides:
        arena, cfg, init = scenario(side, args.cops)
        pb, ps, pw, n, m = run_lane(arena, cfg, init, "pure", args.repeat)
        cb, cs, cw, n2, m2 = run_lane(arena, cfg, init, "compiled", args.repeat)
        if (pw, n, m) != (cw, n2, m2):
            print(f"LANE MISMATCH on {side}x{side}: "
                  f"pure {pw}/{n}/{m} vs compiled {cw}/{n2}/{m2}")
            return 1
        speedup = (pb + ps) / (cb + cs) if cb + cs > 0 else float("inf")
        print(
            f"{side:>4}x{side:<1} {n:>9} {m:>10} "
            f"{pb:>10.3f}s {ps:>10.3f}s "
            f"{cb:>9.3f}s {cs:>9.3f}s {speedup:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
