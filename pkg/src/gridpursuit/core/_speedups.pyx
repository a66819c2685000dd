# distutils: language = c++
"""Compiled kernels: packed-state graph construction and the attractor.

The builder runs the breadth-first reachability sweep over packed int64
states entirely in C++ (dedup via unordered_map), emitting CSR successor
arrays plus per-state turn and terminal classification.  The attractor is
the standard worklist with per-state successor counters.  Both match the
pure backend bit for bit.
"""

import numpy as np

from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

ctypedef long long i64
ctypedef signed char i8

DEF MAX_TEAM = 8

cdef inline i64 _pack(i64* cops, int n_cops, i64* robs, i64* mons, int n_robs,
                      i64 n_cells, i64 n_mon, int turn) nogil:
    cdef i64 key = 0
    cdef int i
    for i in range(n_cops):
        key = key * n_cells + cops[i]
    for i in range(n_robs):
        key = key * n_cells + robs[i]
    for i in range(n_robs):
        key = key * n_mon + mons[i]
    return key * 2 + turn


def build_packed(i64 init_packed, int n_cells, int n_cops, int n_robs,
                 int n_mon_valid, int n_mon_total,
                 int[:, ::1] cop_cand, int[::1] cop_cnt,
                 int[:, ::1] rob_cand, int[::1] rob_cnt,
                 int[:, ::1] mon_next, int[::1] cell_zone,
                 i64 state_cap):
    """BFS over packed states; returns (packed, turn, term, succ_off, succ).

    Returns None when the reachable set exceeds ``state_cap``.  Terminal
    codes: 1 capture, 2 robbers stuck, 3 cops stuck, 4 promise violation.
    """
    if n_cops > MAX_TEAM or n_robs > MAX_TEAM:
        raise ValueError("team size exceeds compiled builder limit")
    cdef:
        vector[i64] states
        unordered_map[i64, int] index
        vector[i64] succ_off
        vector[int] succ
        vector[i8] turn_v
        vector[i8] term_v
        i64 key, rest, nkey
        i64 cops[MAX_TEAM]
        i64 robs[MAX_TEAM]
        i64 mons[MAX_TEAM]
        i64 dest[MAX_TEAM]
        i64 nmon[MAX_TEAM]
        int sel[MAX_TEAM]
        int pos = 0, i, j, turn, nmov, emitted, cur, nxt_idx
        bint capture, bad, ok
        const int[:, ::1] cand
        const int[::1] ccnt
        i64* movers

    states.push_back(init_packed)
    index[init_packed] = 0
    succ_off.push_back(0)

    while pos < <int>states.size():
        key = states[pos]
        rest = key
        turn = <int>(rest % 2)
        rest //= 2
        for i in range(n_robs - 1, -1, -1):
            mons[i] = rest % n_mon_total
            rest //= n_mon_total
        for i in range(n_robs - 1, -1, -1):
            robs[i] = rest % n_cells
            rest //= n_cells
        for i in range(n_cops - 1, -1, -1):
            cops[i] = rest % n_cells
            rest //= n_cells
        turn_v.push_back(<i8>turn)

        capture = False
        for i in range(n_cops):
            for j in range(n_robs):
                if cops[i] == robs[j] and cell_zone[<int>robs[j]] == 0:
                    capture = True
        bad = False
        for i in range(n_robs):
            if mons[i] >= n_mon_valid:
                bad = True
        if capture:
            term_v.push_back(1)
            succ_off.push_back(<i64>succ.size())
            pos += 1
            continue
        if bad:
            term_v.push_back(4)
            succ_off.push_back(<i64>succ.size())
            pos += 1
            continue

        if turn == 0:
            nmov = n_cops
            cand = cop_cand
            ccnt = cop_cnt
            movers = cops
        else:
            nmov = n_robs
            cand = rob_cand
            ccnt = rob_cnt
            movers = robs

        emitted = 0
        ok = True
        for i in range(nmov):
            sel[i] = 0
            if ccnt[<int>movers[i]] == 0:
                ok = False
        while ok:
            # assemble candidate destination tuple
            for i in range(nmov):
                dest[i] = cand[<int>movers[i], sel[i]]
            ok = True
            if turn == 1:
                for i in range(nmov):
                    for j in range(n_cops):
                        if dest[i] == cops[j]:
                            ok = False
            if ok:
                for i in range(nmov):
                    for j in range(i + 1, nmov):
                        if dest[i] == dest[j]:
                            ok = False
                        elif dest[i] == movers[j] and dest[j] == movers[i]:
                            ok = False
            if ok:
                if turn == 0:
                    nkey = _pack(dest, n_cops, robs, mons, n_robs, n_cells, n_mon_total, 1)
                else:
                    for i in range(n_robs):
                        nmon[i] = mon_next[<int>mons[i], cell_zone[<int>dest[i]]]
                    nkey = _pack(cops, n_cops, dest, nmon, n_robs, n_cells, n_mon_total, 0)
                if index.count(nkey):
                    nxt_idx = index[nkey]
                else:
                    nxt_idx = <int>states.size()
                    if nxt_idx >= state_cap:
                        return None
                    index[nkey] = nxt_idx
                    states.push_back(nkey)
                succ.push_back(nxt_idx)
                emitted += 1
            # odometer increment
            cur = nmov - 1
            while cur >= 0:
                sel[cur] += 1
                if sel[cur] < ccnt[<int>movers[cur]]:
                    break
                sel[cur] = 0
                cur -= 1
            ok = cur >= 0

        # push_back(x if c else y) miscompiles: the conditional temp binds a
        # dangling reference, so keep each push a plain literal
        if emitted == 0:
            if turn == 0:
                term_v.push_back(3)
            else:
                term_v.push_back(2)
        else:
            term_v.push_back(0)
        succ_off.push_back(<i64>succ.size())
        pos += 1

    cdef int n = <int>states.size()
    cdef i64 m = <i64>succ.size()
    packed_arr = np.empty(n, dtype=np.int64)
    turn_arr = np.empty(n, dtype=np.int8)
    term_arr = np.empty(n, dtype=np.int8)
    off_arr = np.empty(n + 1, dtype=np.int64)
    succ_arr = np.empty(m, dtype=np.int32)
    cdef i64[::1] pv = packed_arr
    cdef i8[::1] tv = turn_arr
    cdef i8[::1] ev = term_arr
    cdef i64[::1] ov = off_arr
    cdef int[::1] sv = succ_arr
    for i in range(n):
        pv[i] = states[i]
        tv[i] = turn_v[i]
        ev[i] = term_v[i]
    for i in range(n + 1):
        ov[i] = succ_off[i]
    cdef i64 e
    for e in range(m):
        sv[e] = succ[e]
    return packed_arr, turn_arr, term_arr, off_arr, succ_arr


def attractor(i64[::1] succ_off, int[::1] succ,
              i64[::1] pred_off, int[::1] pred,
              const unsigned char[::1] owner_sys, int player_sys,
              const unsigned char[::1] target, const unsigned char[::1] active,
              const unsigned char[::1] sunk):
    """FIFO attractor matching gridpursuit.core.pure.attractor."""
    cdef int n = <int>owner_sys.shape[0]
    in_arr = np.zeros(n, dtype=np.uint8)
    rank_arr = np.full(n, -1, dtype=np.int32)
    cnt_arr = np.zeros(n, dtype=np.int64)
    cdef unsigned char[::1] in_set = in_arr
    cdef int[::1] rank = rank_arr
    cdef i64[::1] cnt = cnt_arr
    cdef vector[int] queue
    cdef int head = 0, s, u, v
    cdef i64 e
    cdef bint is_player

    for s in range(n):
        if not active[s]:
            continue
        is_player = (owner_sys[s] != 0) == (player_sys != 0)
        if not is_player:
            for e in range(succ_off[s], succ_off[s + 1]):
                if not sunk[succ[e]]:
                    cnt[s] += 1
        if target[s]:
            in_set[s] = 1
        elif not is_player and cnt[s] == 0:
            in_set[s] = 1
        elif is_player:
            for e in range(succ_off[s], succ_off[s + 1]):
                if sunk[succ[e]]:
                    in_set[s] = 1
                    break
        if in_set[s]:
            rank[s] = 0
            queue.push_back(s)

    while head < <int>queue.size():
        s = queue[head]
        head += 1
        for e in range(pred_off[s], pred_off[s + 1]):
            u = pred[e]
            if not active[u] or in_set[u]:
                continue
            is_player = (owner_sys[u] != 0) == (player_sys != 0)
            if is_player:
                in_set[u] = 1
                rank[u] = rank[s] + 1
                queue.push_back(u)
            else:
                cnt[u] -= 1
                if cnt[u] == 0:
                    in_set[u] = 1
                    rank[u] = rank[s] + 1
                    queue.push_back(u)
    return in_arr, rank_arr
