"""Compiled inner loop for the coupled walk.

One call simulates one replicate: it feeds a fixed array of uniform pairs
through the treap cycle index and the union-find multigraph simultaneously
and writes a statistics row at each scheduled event-count threshold.  All
randomness is drawn by the caller beforehand so replicates are reproducible
and the kernel itself is deterministic.
"""

from __future__ import annotations

import numba
import numpy as np

from cyclewalk._treap import t_apply_coag, t_apply_frag, t_locate, t_root

# out columns written per snapshot
COL_N_RAW = 0
COL_N_NT = 1
COL_D = 2
COL_Z = 3
COL_K1 = 4
COL_L1 = 5
COL_N_UP = 6
COL_COMPONENTS = 7
COL_GIANT = 8
N_COLS = 9


@numba.njit(cache=True, nogil=True)
def _snapshot(out, si, step, n, nt, z, ncyc, ncomp, spec, parent, size,
              gparent, gv, mass_cutoff):
    out[si, COL_N_RAW] = step
    out[si, COL_N_NT] = nt
    out[si, COL_D] = n - ncyc
    out[si, COL_Z] = z
    out[si, COL_K1] = size[t_root(parent, 1)]
    l1 = 0
    nup = 0
    for k in range(1, n + 1):
        if spec[k] > 0:
            l1 = k
            if k > mass_cutoff:
                nup += k * spec[k]
    out[si, COL_L1] = l1
    out[si, COL_N_UP] = nup
    out[si, COL_COMPONENTS] = ncomp
    giant = 0
    for r in range(1, n + 1):
        if gparent[r] == r and gv[r] > giant:
            giant = gv[r]
    out[si, COL_GIANT] = giant


@numba.njit(cache=True, nogil=True)
def coupled_walk(n, pairs, thresholds, prio, mass_cutoff, out):
    """Run len(pairs) transposition events, recording at each threshold.

    pairs: (N, 2) int64 in 1..n; thresholds: ascending event counts with
    thresholds[-1] == N; prio: treap priorities (uint64, length n+1);
    out: (len(thresholds), N_COLS) int64, filled in place.
    """
    left = np.zeros(n + 1, dtype=np.int64)
    right = np.zeros(n + 1, dtype=np.int64)
    parent = np.zeros(n + 1, dtype=np.int64)
    size = np.ones(n + 1, dtype=np.int64)
    size[0] = 0
    sigma = np.arange(n + 1)
    spec = np.zeros(n + 2, dtype=np.int64)
    spec[1] = n
    gparent = np.arange(n + 1)
    gv = np.ones(n + 1, dtype=np.int64)
    ge = np.zeros(n + 1, dtype=np.int64)
    ncomp = n
    ncyc = n
    z = 0
    nt = 0
    si = 0
    n_snap = thresholds.shape[0]
    while si < n_snap and thresholds[si] == 0:
        _snapshot(out, si, 0, n, nt, z, ncyc, ncomp, spec, parent, size,
                  gparent, gv, mass_cutoff)
        si += 1
    for step in range(1, pairs.shape[0] + 1):
        i = pairs[step - 1, 0]
        j = pairs[step - 1, 1]
        if i != j:
            nt += 1
            ri, pi = t_locate(left, right, parent, size, i)
            rj, pj = t_locate(left, right, parent, size, j)
            if ri == rj:
                z += 1
                length = size[ri]
                d, rest = t_apply_frag(left, right, parent, size, prio,
                                       ri, pi, pj)
                spec[length] -= 1
                spec[d] += 1
                spec[rest] += 1
                ncyc += 1
            else:
                a = size[ri]
                b = size[rj]
                t_apply_coag(left, right, parent, size, prio, ri, pi, rj, pj)
                spec[a] -= 1
                spec[b] -= 1
                spec[a + b] += 1
                ncyc -= 1
            tmp = sigma[i]
            sigma[i] = sigma[j]
            sigma[j] = tmp
            x = i
            while gparent[x] != x:
                gparent[x] = gparent[gparent[x]]
                x = gparent[x]
            y = j
            while gparent[y] != y:
                gparent[y] = gparent[gparent[y]]
                y = gparent[y]
            if x == y:
                ge[x] += 1
            else:
                if gv[x] < gv[y]:
                    x, y = y, x
                gparent[y] = x
                gv[x] += gv[y]
                ge[x] += ge[y] + 1
                ncomp -= 1
        while si < n_snap and thresholds[si] == step:
            _snapshot(out, si, step, n, nt, z, ncyc, ncomp, spec, parent, size,
                      gparent, gv, mass_cutoff)
            si += 1
    return si
