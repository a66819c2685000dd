"""Numpy implementations of the solver kernels.

These mirror the compiled kernels exactly: same fixpoint, same entry
ranks (the iteration at which a state joins the attractor).  They are the
fallback when the extension is not built and the reference the compiled
lane is tested against.
"""

from __future__ import annotations

import numpy as np


def gather_csr(off: np.ndarray, dat: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Concatenate dat[off[i]:off[i+1]] for every i in idx."""
    if idx.size == 0:
        return dat[:0]
    counts = off[idx + 1] - off[idx]
    total = int(counts.sum())
    if total == 0:
        return dat[:0]
    ends = np.cumsum(counts)
    src = np.arange(total, dtype=np.int64) - np.repeat(ends - counts, counts)
    src += np.repeat(off[idx], counts)
    return dat[src]


def attractor(
    succ_off: np.ndarray,
    succ: np.ndarray,
    pred_off: np.ndarray,
    pred: np.ndarray,
    owner_sys: np.ndarray,
    player_sys: bool,
    target: np.ndarray,
    active: np.ndarray,
    sunk: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Backward fixpoint of states the player can force into ``target``.

    Level-synchronous worklist with per-state successor counters: a
    player-owned state joins when some successor is in, an opponent-owned
    state when all of its successors are (so an opponent with no moves
    joins outright).  ``active`` limits the arena; ``sunk`` marks states
    outside it that count as already won by the player, for both the
    universal and the existential condition.  Returns (membership mask,
    entry iteration or -1).
    """
    n = len(owner_sys)
    owner_sys = owner_sys.astype(bool, copy=False)
    target = target.astype(bool, copy=False)
    active = active.astype(bool, copy=False)
    sunk = sunk.astype(bool, copy=False)
    player_mask = owner_sys if player_sys else ~owner_sys

    if len(succ):
        edge_src = np.repeat(
            np.arange(n, dtype=np.int64), np.diff(succ_off).astype(np.int64)
        )
        live_edge = ~sunk[succ]
        cnt = np.bincount(edge_src[live_edge], minlength=n)
    else:
        edge_src = np.empty(0, dtype=np.int64)
        cnt = np.zeros(n, dtype=np.int64)

    in_set = target & active
    # opponent stuck (or every move sunk): universal condition holds vacuously
    in_set |= active & ~player_mask & (cnt == 0)
    if sunk.any() and len(succ):
        has_sunk_succ = np.bincount(edge_src[sunk[succ]], minlength=n) > 0
        in_set |= active & player_mask & has_sunk_succ

    rank = np.full(n, -1, dtype=np.int32)
    rank[in_set] = 0
    frontier = np.flatnonzero(in_set)
    r = 0
    while frontier.size:
        r += 1
        preds = gather_csr(pred_off, pred, frontier.astype(np.int64))
        preds = preds[active[preds] & ~in_set[preds]]
        if preds.size == 0:
            break
        new_player = preds[player_mask[preds]]
        opp = preds[~player_mask[preds]]
        if opp.size:
            np.subtract.at(cnt, opp, 1)
            opp = np.unique(opp)
            new_opp = opp[cnt[opp] == 0]
        else:
            new_opp = opp
        new = np.unique(np.concatenate([new_player, new_opp]))
        if new.size == 0:
            break
        in_set[new] = True
        rank[new] = r
        frontier = new
    return in_set.astype(np.uint8), rank
