"""Array-backed randomized balanced tree over cyclic sequences.

Each permutation cycle is stored as one implicit-key treap whose in-order
traversal lists the cycle in successor order (up to rotation).  Nodes are the
elements 1..n themselves, so the whole forest lives in five flat arrays
(left, right, parent, subtree size, heap priority) indexed by element; index 0
is the null sentinel.  Everything is iterative so the routines can be njit
compiled and shared between the Python wrapper class and the walk kernel.

split/join are the standard treap operations with an extra parent-pointer
climb to fix subtree sizes; locate(x) walks up from x to report its root and
in-order position, which is what turns "are i and j in one cycle" and "how far
is j after i around the cycle" into O(log n) questions.
"""

from __future__ import annotations

import numba
import numpy as np

_SIG_CACHE = {"cache": True, "nogil": True}


@numba.njit(**_SIG_CACHE)
def t_init(left, right, parent, size):
    """Reset to n singleton sequences (element k alone in its own cycle)."""
    n = left.shape[0] - 1
    for k in range(n + 1):
        left[k] = 0
        right[k] = 0
        parent[k] = 0
        size[k] = 1
    size[0] = 0


@numba.njit(**_SIG_CACHE)
def t_root(parent, x):
    while parent[x] != 0:
        x = parent[x]
    return x


@numba.njit(**_SIG_CACHE)
def t_locate(left, right, parent, size, x):
    """Return (root, pos) where pos is the 1-based in-order index of x."""
    pos = size[left[x]] + 1
    v = x
    while parent[v] != 0:
        p = parent[v]
        if right[p] == v:
            pos += size[left[p]] + 1
        v = p
    return v, pos


@numba.njit(**_SIG_CACHE)
def t_split(left, right, parent, size, root, k):
    """Split the sequence at root into (first k elements, rest)."""
    a_root = 0
    b_root = 0
    a_hook = 0
    b_hook = 0
    cur = root
    while cur != 0:
        lsz = size[left[cur]]
        if lsz + 1 <= k:
            k -= lsz + 1
            nxt = right[cur]
            right[cur] = 0
            if a_hook == 0:
                a_root = cur
                parent[cur] = 0
            else:
                right[a_hook] = cur
                parent[cur] = a_hook
            a_hook = cur
            cur = nxt
        else:
            nxt = left[cur]
            left[cur] = 0
            if b_hook == 0:
                b_root = cur
                parent[cur] = 0
            else:
                left[b_hook] = cur
                parent[cur] = b_hook
            b_hook = cur
            cur = nxt
    v = a_hook
    while v != 0:
        size[v] = size[left[v]] + size[right[v]] + 1
        v = parent[v]
    v = b_hook
    while v != 0:
        size[v] = size[left[v]] + size[right[v]] + 1
        v = parent[v]
    return a_root, b_root


@numba.njit(**_SIG_CACHE)
def t_join(left, right, parent, size, prio, a, b):
    """Concatenate sequences a and b, returning the new root."""
    if a == 0:
        return b
    if b == 0:
        return a
    root = 0
    hook = 0
    hook_right = True
    while a != 0 and b != 0:
        if prio[a] > prio[b]:
            nxt = right[a]
            if hook == 0:
                root = a
                parent[a] = 0
            elif hook_right:
                right[hook] = a
                parent[a] = hook
            else:
                left[hook] = a
                parent[a] = hook
            hook = a
            hook_right = True
            a = nxt
        else:
            nxt = left[b]
            if hook == 0:
                root = b
                parent[b] = 0
            elif hook_right:
                right[hook] = b
                parent[b] = hook
            else:
                left[hook] = b
                parent[b] = hook
            hook = b
            hook_right = False
            b = nxt
    rest = a if a != 0 else b
    if hook_right:
        right[hook] = rest
    else:
        left[hook] = rest
    parent[rest] = hook
    v = rest
    while v != 0:
        size[v] = size[left[v]] + size[right[v]] + 1
        v = parent[v]
    return root


@numba.njit(**_SIG_CACHE)
def t_rotate_front(left, right, parent, size, prio, root, pos):
    """Rotate the cyclic sequence so the element at `pos` comes first."""
    if pos == 1:
        return root
    a, b = t_split(left, right, parent, size, root, pos - 1)
    return t_join(left, right, parent, size, prio, b, a)


@numba.njit(**_SIG_CACHE)
def t_sequence(left, right, parent, size, root, out):
    """In-order traversal of `root` into out[:size[root]] (iterative DFS)."""
    n_out = 0
    v = root
    # morris-free traversal using the parent pointers: go to leftmost, then
    # successor steps
    if v == 0:
        return 0
    while left[v] != 0:
        v = left[v]
    while v != 0:
        out[n_out] = v
        n_out += 1
        if right[v] != 0:
            v = right[v]
            while left[v] != 0:
                v = left[v]
        else:
            child = v
            v = parent[v]
            while v != 0 and right[v] == child:
                child = v
                v = parent[v]
    return n_out


@numba.njit(**_SIG_CACHE)
def t_apply_frag(left, right, parent, size, prio, root_i, pos_i, pos_j):
    """Split the cycle holding i and j (same treap) into two cycles.

    The cycle (i, d1, .., d_{L-1}) with j = d_m breaks into (j, d1, .., d_{m-1})
    and (i, d_{m+1}, .., d_{L-1}).  Returns (m, L - m): the sizes of the cycle
    now holding j and the one now holding i.
    """
    length = size[root_i]
    r = t_rotate_front(left, right, parent, size, prio, root_i, pos_i)
    m = pos_j - pos_i
    if m < 0:
        m += length
    single, rest = t_split(left, right, parent, size, r, 1)
    seg_j, seg_i = t_split(left, right, parent, size, rest, m)
    t_join(left, right, parent, size, prio, single, seg_i)
    return m, length - m


@numba.njit(**_SIG_CACHE)
def t_apply_coag(left, right, parent, size, prio, root_i, pos_i, root_j, pos_j):
    """Merge the distinct cycles of i and j into one.

    With cycles (i, a1..ap) and (j, b1..bq) the merged cycle is
    (i, b1..bq, j, a1..ap).  Returns the new root.
    """
    ra = t_rotate_front(left, right, parent, size, prio, root_i, pos_i)
    b1, b2 = t_split(left, right, parent, size, root_j, pos_j)
    rb = t_join(left, right, parent, size, prio, b2, b1)
    single, a_rest = t_split(left, right, parent, size, ra, 1)
    head = t_join(left, right, parent, size, prio, single, rb)
    return t_join(left, right, parent, size, prio, head, a_rest)
