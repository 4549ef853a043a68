"""Numba kernels for the Monte Carlo samplers.

All kernels walk a CSR multigraph (``indptr``, ``inc_edge``, ``inc_other``,
``edge_u``, ``edge_v``) and draw randomness from splitmix64 streams keyed by
(seed, sample index), mirroring :mod:`loopstats.rng` bit for bit.  Because
every sample owns its stream, chunking a run across workers cannot change
its output.

Tree-building uses Wilson's algorithm: repeated random walks, loop-erased
on the fly with a stack, rooted at the sink.  The batch kernels build only
the branches that the requested statistic depends on (the tree law is
independent of the order vertices are processed, and once a vertex joins
the tree its path to the sink is final, so stopping early does not change
the law of the recorded statistic).
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


@njit(uint64(uint64), cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(uint64(uint64, uint64), cache=True, inline="always")
def _derive_state(seed, index):
    return _mix(_mix(seed + _GAMMA * index) + _GAMMA)


@njit(cache=True, inline="always")
def _randint(state, k):
    """Unbiased draw from [0, k).  Returns (new_state, value)."""
    ku = np.uint64(k)
    lim = (_MASK // ku) * ku
    while True:
        state = state + _GAMMA
        u = _mix(state)
        if u < lim:
            return state, np.int64(u % ku)


@njit(cache=True)
def _rng_selftest(seed, n):
    """Raw outputs for pinning kernel RNG against the Python implementation."""
    out = np.empty(n, dtype=np.uint64)
    state = _derive_state(np.uint64(seed), np.uint64(0))
    for i in range(n):
        state = state + _GAMMA
        out[i] = _mix(state)
    return out


@njit(cache=True, inline="always")
def _step(state, indptr, inc_edge, inc_other, x):
    deg = indptr[x + 1] - indptr[x]
    state, j = _randint(state, deg)
    i = indptr[x] + j
    return state, inc_other[i], inc_edge[i]


@njit(cache=True, inline="always")
def _parent_of(x, eid, edge_u, edge_v):
    u = edge_u[eid]
    return edge_v[eid] if u == x else u


@njit(cache=True, nogil=True)
def _build_branch(state, indptr, inc_edge, inc_other, sink,
                  tree_stamp, stamp, parent_edge,
                  pos, pos_stamp, branch_id, sv, ev, start):
    """Loop-erased random walk from ``start`` to the current tree.

    The stack (sv, ev) holds the erased walk; pos/pos_stamp track stack
    membership.  On return the branch is committed: tree_stamp and
    parent_edge are set for every vertex on the erased path.
    """
    sv[0] = start
    pos[start] = 0
    pos_stamp[start] = branch_id
    ln = np.int64(1)
    x = start
    while True:
        state, y, e = _step(state, indptr, inc_edge, inc_other, x)
        if y == sink or tree_stamp[y] == stamp:
            ev[ln - 1] = e
            break
        if pos_stamp[y] == branch_id:
            p = pos[y]
            for k in range(p + 1, ln):
                pos_stamp[sv[k]] = 0
            ln = p + 1
            x = y
        else:
            pos[y] = ln
            pos_stamp[y] = branch_id
            ev[ln - 1] = e
            sv[ln] = y
            ln += 1
            x = y
    for k in range(ln):
        v = sv[k]
        tree_stamp[v] = stamp
        parent_edge[v] = ev[k]
    return state


@njit(cache=True, inline="always")
def _depth_of(v, sink, parent_edge, edge_u, edge_v,
              depth, depth_stamp, stamp, scratch):
    """Depth of in-tree vertex v (sink depth 0), memoized via stamps."""
    cnt = np.int64(0)
    x = v
    while x != sink and depth_stamp[x] != stamp:
        scratch[cnt] = x
        cnt += 1
        x = _parent_of(x, parent_edge[x], edge_u, edge_v)
    base = np.int64(0) if x == sink else depth[x]
    for k in range(cnt - 1, -1, -1):
        base += 1
        depth[scratch[k]] = base
        depth_stamp[scratch[k]] = stamp
    return np.int64(0) if v == sink else depth[v]


@njit(cache=True, nogil=True)
def wilson_parent_edges(indptr, inc_edge, inc_other, edge_u, edge_v,
                        nv, sink, order, seed, index):
    """One spanning tree rooted at the sink; exactly uniform.

    Vertices in ``order`` get branches in that order; any vertex not
    reachable through those branches is left with parent -2 (pass every
    non-sink vertex for a full tree).  Sink gets -1.
    """
    parent_edge = np.full(nv, -2, dtype=np.int64)
    parent_edge[sink] = -1
    tree_stamp = np.zeros(nv, dtype=np.int64)
    pos = np.zeros(nv, dtype=np.int64)
    pos_stamp = np.zeros(nv, dtype=np.int64)
    sv = np.empty(nv + 1, dtype=np.int64)
    ev = np.empty(nv + 1, dtype=np.int64)
    stamp = np.int64(1)
    branch_id = np.int64(0)
    state = _derive_state(np.uint64(seed), np.uint64(index))
    for t in range(order.shape[0]):
        w = order[t]
        if w == sink or tree_stamp[w] == stamp:
            continue
        branch_id += 1
        state = _build_branch(state, indptr, inc_edge, inc_other, sink,
                              tree_stamp, stamp, parent_edge,
                              pos, pos_stamp, branch_id, sv, ev, w)
    return parent_edge


@njit(cache=True, nogil=True)
def origin_joint_counts(indptr, inc_edge, inc_other, edge_u, edge_v,
                        nv, sink, targets, nsamples, seed, start_index):
    """Joint counts of (descendant edge count j, height sigma) at a vertex.

    ``targets[0]`` is the vertex x; the remaining targets are its distinct
    non-sink neighbors.  Each sample grows a uniform spanning tree just far
    enough to fix the tree paths of all targets, then reads off

    * j: edge ends at x leading into x's descendant subtree (a self-loop
      contributes both ends),
    * D: distinct non-sink neighbors of x that are descendants,
    * sigma: the height the tree-to-sandpile bijection assigns at x.

    Returns (joint[j, sigma] counts, D histogram).
    """
    x0 = targets[0]
    deg0 = indptr[x0 + 1] - indptr[x0]
    joint = np.zeros((deg0 + 1, deg0 + 1), dtype=np.int64)
    dhist = np.zeros(deg0 + 2, dtype=np.int64)

    tree_stamp = np.zeros(nv, dtype=np.int64)
    pos = np.zeros(nv, dtype=np.int64)
    pos_stamp = np.zeros(nv, dtype=np.int64)
    depth = np.zeros(nv, dtype=np.int64)
    depth_stamp = np.zeros(nv, dtype=np.int64)
    parent_edge = np.full(nv, -1, dtype=np.int64)
    sv = np.empty(nv + 1, dtype=np.int64)
    ev = np.empty(nv + 1, dtype=np.int64)
    scratch = np.empty(nv + 1, dtype=np.int64)
    branch_id = np.int64(0)

    for s in range(nsamples):
        stamp = np.int64(s + 1)
        state = _derive_state(np.uint64(seed), np.uint64(start_index + s))
        for t in range(targets.shape[0]):
            w = targets[t]
            if w == sink or tree_stamp[w] == stamp:
                continue
            branch_id += 1
            state = _build_branch(state, indptr, inc_edge, inc_other, sink,
                                  tree_stamp, stamp, parent_edge,
                                  pos, pos_stamp, branch_id, sv, ev, w)
        lo = _depth_of(x0, sink, parent_edge, edge_u, edge_v,
                       depth, depth_stamp, stamp, scratch)
        eo = parent_edge[x0]
        a = np.int64(0)
        b = np.int64(0)
        j = np.int64(0)
        seen_parent = False
        for i in range(indptr[x0], indptr[x0 + 1]):
            y = inc_other[i]
            e = inc_edge[i]
            if e == eo and not seen_parent and y != x0:
                seen_parent = True
                continue
            if y == x0:
                j += 1          # self-loop end: x is its own descendant
                continue
            ly = np.int64(0) if y == sink else _depth_of(
                y, sink, parent_edge, edge_u, edge_v,
                depth, depth_stamp, stamp, scratch)
            if ly < lo - 1:
                a += 1
            elif ly == lo - 1 and not seen_parent:
                b += 1
            if y != sink and ly > lo:
                z = y
                for _ in range(ly - lo):
                    z = _parent_of(z, parent_edge[z], edge_u, edge_v)
                if z == x0:
                    j += 1
        sigma = deg0 - 1 - a - b
        # D: distinct descendant neighbors, read from the target list
        D = np.int64(0)
        for t in range(1, targets.shape[0]):
            y = targets[t]
            ly = _depth_of(y, sink, parent_edge, edge_u, edge_v,
                           depth, depth_stamp, stamp, scratch)
            if ly > lo:
                z = y
                for _ in range(ly - lo):
                    z = _parent_of(z, parent_edge[z], edge_u, edge_v)
                if z == x0:
                    D += 1
        joint[j, sigma] += 1
        dhist[D] += 1
    return joint, dhist


@njit(cache=True, nogil=True)
def lerw_hit_counts(indptr, inc_edge, inc_other, nv, sink,
                    start, target, nsamples, seed, start_index):
    """Count samples whose loop-erased exit walk from ``start`` visits ``target``.

    The walk runs until it steps onto the sink; the surviving stack is the
    loop erasure of the walk (minus the exit site), so the indicator only
    needs a stack-membership test.
    """
    pos = np.zeros(nv, dtype=np.int64)
    pos_stamp = np.zeros(nv, dtype=np.int64)
    sv = np.empty(nv + 1, dtype=np.int64)
    hits = np.int64(0)
    for s in range(nsamples):
        branch = np.int64(s + 1)
        state = _derive_state(np.uint64(seed), np.uint64(start_index + s))
        sv[0] = start
        pos[start] = 0
        pos_stamp[start] = branch
        ln = np.int64(1)
        x = start
        while True:
            state, y, e = _step(state, indptr, inc_edge, inc_other, x)
            if y == sink:
                break
            if pos_stamp[y] == branch:
                p = pos[y]
                for k in range(p + 1, ln):
                    pos_stamp[sv[k]] = 0
                ln = p + 1
                x = y
            else:
                pos[y] = ln
                pos_stamp[y] = branch
                sv[ln] = y
                ln += 1
                x = y
        if pos_stamp[target] == branch:
            hits += 1
    return hits


@njit(cache=True, nogil=True)
def ustplus_cycle_counts(indptr, inc_edge, inc_other, edge_u, edge_v,
                         nv, sink, nsamples, seed, start_index):
    """Cycle-length histogram of tree-plus-uniform-non-tree-edge draws.

    Per sample: draw a uniform edge f and an independent uniform spanning
    tree, restarted until f is not a tree edge.  Because every spanning
    tree misses the same number of edges, acceptance does not tilt the
    tree law, and the accepted f is uniform over non-tree edges.  The cycle
    is f plus the tree path between its endpoints; only the two branches
    containing the endpoints are ever built.

    Returns (hist, attempts) where hist[L] counts cycles of length L.
    """
    m = edge_u.shape[0]
    tree_stamp = np.zeros(nv, dtype=np.int64)
    pos = np.zeros(nv, dtype=np.int64)
    pos_stamp = np.zeros(nv, dtype=np.int64)
    depth = np.zeros(nv, dtype=np.int64)
    depth_stamp = np.zeros(nv, dtype=np.int64)
    parent_edge = np.full(nv, -1, dtype=np.int64)
    sv = np.empty(nv + 1, dtype=np.int64)
    ev = np.empty(nv + 1, dtype=np.int64)
    scratch = np.empty(nv + 1, dtype=np.int64)
    branch_id = np.int64(0)
    hist = np.zeros(nv + 2, dtype=np.int64)
    attempts = np.int64(0)
    stamp = np.int64(0)

    for s in range(nsamples):
        state = _derive_state(np.uint64(seed), np.uint64(start_index + s))
        while True:
            attempts += 1
            stamp += 1
            state, f = _randint(state, m)
            u = edge_u[f]
            v = edge_v[f]
            if u == v:
                hist[1] += 1      # a self-loop is never a tree edge; cycle length 1
                break
            for t in range(2):
                w = u if t == 0 else v
                if w == sink or tree_stamp[w] == stamp:
                    continue
                branch_id += 1
                state = _build_branch(state, indptr, inc_edge, inc_other, sink,
                                      tree_stamp, stamp, parent_edge,
                                      pos, pos_stamp, branch_id, sv, ev, w)
            if (u != sink and parent_edge[u] == f and tree_stamp[u] == stamp) or \
               (v != sink and parent_edge[v] == f and tree_stamp[v] == stamp):
                continue          # f landed in the tree: reject tree and edge together
            du = _depth_of(u, sink, parent_edge, edge_u, edge_v,
                           depth, depth_stamp, stamp, scratch)
            dv = _depth_of(v, sink, parent_edge, edge_u, edge_v,
                           depth, depth_stamp, stamp, scratch)
            a = u
            b = v
            steps = np.int64(0)
            while du > dv:
                a = _parent_of(a, parent_edge[a], edge_u, edge_v)
                du -= 1
                steps += 1
            while dv > du:
                b = _parent_of(b, parent_edge[b], edge_u, edge_v)
                dv -= 1
                steps += 1
            while a != b:
                a = _parent_of(a, parent_edge[a], edge_u, edge_v)
                b = _parent_of(b, parent_edge[b], edge_u, edge_v)
                steps += 2
            hist[steps + 1] += 1
            break
    return hist, attempts


@njit(cache=True, nogil=True)
def recurrent_pile_batch(indptr, inc_edge, inc_other, edge_u, edge_v,
                         nv, sink, nsamples, seed, start_index, origin):
    """Full uniform spanning trees mapped through the burning bijection.

    Returns (height_sums[nv], pile_totals[nsamples], origin_vals[nsamples]).
    height_sums accumulates per-vertex heights over samples; pile_totals[s]
    is the total particle count of sample s; origin_vals[s] is the height
    at ``origin`` (all zeros when origin < 0).  Used for bulk-average
    checks and batch sampling of exactly uniform recurrent sandpiles.
    """
    tree_stamp = np.zeros(nv, dtype=np.int64)
    pos = np.zeros(nv, dtype=np.int64)
    pos_stamp = np.zeros(nv, dtype=np.int64)
    depth = np.zeros(nv, dtype=np.int64)
    depth_stamp = np.zeros(nv, dtype=np.int64)
    parent_edge = np.full(nv, -1, dtype=np.int64)
    sv = np.empty(nv + 1, dtype=np.int64)
    ev = np.empty(nv + 1, dtype=np.int64)
    scratch = np.empty(nv + 1, dtype=np.int64)
    branch_id = np.int64(0)
    height_sums = np.zeros(nv, dtype=np.int64)
    pile_totals = np.zeros(nsamples, dtype=np.int64)
    origin_vals = np.zeros(nsamples, dtype=np.int64)

    for s in range(nsamples):
        stamp = np.int64(s + 1)
        state = _derive_state(np.uint64(seed), np.uint64(start_index + s))
        for w in range(nv):
            if w == sink or tree_stamp[w] == stamp:
                continue
            branch_id += 1
            state = _build_branch(state, indptr, inc_edge, inc_other, sink,
                                  tree_stamp, stamp, parent_edge,
                                  pos, pos_stamp, branch_id, sv, ev, w)
        total = np.int64(0)
        for x in range(nv):
            if x == sink:
                continue
            h = _bijection_height(x, indptr, inc_edge, inc_other, edge_u, edge_v,
                                  sink, parent_edge, depth, depth_stamp, stamp,
                                  scratch)
            height_sums[x] += h
            total += h
            if x == origin:
                origin_vals[s] = h
        pile_totals[s] = total
    return height_sums, pile_totals, origin_vals


@njit(cache=True, inline="always")
def _bijection_height(x, indptr, inc_edge, inc_other, edge_u, edge_v,
                      sink, parent_edge, depth, depth_stamp, stamp, scratch):
    lo = _depth_of(x, sink, parent_edge, edge_u, edge_v,
                   depth, depth_stamp, stamp, scratch)
    eo = parent_edge[x]
    deg = indptr[x + 1] - indptr[x]
    a = np.int64(0)
    b = np.int64(0)
    seen_parent = False
    for i in range(indptr[x], indptr[x + 1]):
        y = inc_other[i]
        e = inc_edge[i]
        if e == eo and not seen_parent and y != x:
            seen_parent = True
            continue
        if y == x:
            continue
        ly = np.int64(0) if y == sink else _depth_of(
            y, sink, parent_edge, edge_u, edge_v,
            depth, depth_stamp, stamp, scratch)
        if ly < lo - 1:
            a += 1
        elif ly == lo - 1 and not seen_parent:
            b += 1
    return deg - 1 - a - b


@njit(cache=True, nogil=True)
def single_recurrent_pile(indptr, inc_edge, inc_other, edge_u, edge_v,
                          nv, sink, seed, index):
    """One exactly uniform recurrent sandpile (full tree + bijection)."""
    parent_edge = wilson_parent_edges(indptr, inc_edge, inc_other,
                                      edge_u, edge_v, nv, sink,
                                      np.arange(nv, dtype=np.int64), seed, index)
    depth = np.zeros(nv, dtype=np.int64)
    depth_stamp = np.zeros(nv, dtype=np.int64)
    scratch = np.empty(nv + 1, dtype=np.int64)
    heights = np.zeros(nv, dtype=np.int64)
    for x in range(nv):
        if x == sink:
            continue
        heights[x] = _bijection_height(x, indptr, inc_edge, inc_other,
                                       edge_u, edge_v, sink, parent_edge,
                                       depth, depth_stamp, np.int64(1), scratch)
    return heights
