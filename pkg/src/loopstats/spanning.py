"""Wired uniform spanning trees and exact spanning-structure counts.

Sampling is Wilson's algorithm on the sinked multigraph: iterated
loop-erased random walks rooted at the sink, exactly uniform over spanning
trees.  Counting is Kirchhoff's determinant, evaluated fraction-free in
exact integer arithmetic (Bareiss), so the counts stay exact no matter how
fast they grow.
"""

from __future__ import annotations

from math import comb

import numpy as np

from . import _kernels
from .estimates import Estimate
from .graph import SinkedMultigraph, collapse_boundary
from .lattice import build_cube_region
from .walks import _fan_out


class SpanningForest:
    """Spanning tree rooted at the sink, stored as parent edges.

    parent_edge[x] is the first edge on x's path to the sink; -1 marks the
    sink itself.  Depths are computed once on demand (depth of the sink
    is 0).
    """

    def __init__(self, graph: SinkedMultigraph, parent_edge):
        self.graph = graph
        self.parent_edge = np.asarray(parent_edge, dtype=np.int64)
        if self.parent_edge[graph.sink] != -1:
            raise ValueError("sink must have parent -1")
        self._depth = None

    def parent_vertex(self, x: int) -> int:
        e = int(self.parent_edge[x])
        return self.graph.other_end(e, x)

    def edges(self) -> list[int]:
        return [int(e) for x, e in enumerate(self.parent_edge) if x != self.graph.sink]

    def depths(self) -> np.ndarray:
        if self._depth is None:
            g = self.graph
            depth = np.full(g.nv, -1, dtype=np.int64)
            depth[g.sink] = 0
            stack = []
            for v in range(g.nv):
                x = v
                while depth[x] < 0:
                    stack.append(x)
                    x = self.parent_vertex(x)
                base = depth[x]
                while stack:
                    base += 1
                    depth[stack.pop()] = base
            self._depth = depth
        return self._depth

    def depth(self, x: int) -> int:
        return int(self.depths()[x])

    def path_to_sink(self, x: int) -> list[int]:
        out = [x]
        while out[-1] != self.graph.sink:
            out.append(self.parent_vertex(out[-1]))
        return out

    def is_descendant(self, y: int, x: int) -> bool:
        """True when x lies on y's path to the sink (y counts as its own)."""
        depths = self.depths()
        if depths[y] < depths[x]:
            return False
        z = y
        for _ in range(int(depths[y] - depths[x])):
            z = self.parent_vertex(z)
        return z == x

    def validate(self):
        """Assert the forest invariants: acyclic, all paths reach the sink."""
        g = self.graph
        for v in range(g.nv):
            if v == g.sink:
                continue
            seen = {v}
            x = v
            while x != g.sink:
                x = self.parent_vertex(x)
                if x in seen:
                    raise AssertionError(f"cycle through vertex {v}")
                seen.add(x)
        edges = self.edges()
        if len(set(edges)) != g.nv - 1:
            raise AssertionError("parent edges are not distinct")


def wilson_ust(graph: SinkedMultigraph, seed: int, index: int = 0) -> SpanningForest:
    """Uniform spanning tree rooted at the sink via Wilson's algorithm."""
    if not graph.is_connected():
        raise ValueError("graph must be connected")
    order = np.arange(graph.nv, dtype=np.int64)
    parent = _kernels.wilson_parent_edges(
        graph.indptr, graph.inc_edge, graph.inc_other,
        graph.edge_u, graph.edge_v, graph.nv, graph.sink,
        order, np.uint64(seed), np.uint64(index))
    forest = SpanningForest(graph, parent)
    if __debug__:
        forest.validate()
    return forest


def descendant_neighbor_count(forest: SpanningForest, graph: SinkedMultigraph,
                              x: int) -> int:
    """Number of distinct non-sink neighbors of x that are descendants of x."""
    if x == graph.sink:
        raise ValueError("the sink has no descendants")
    return sum(1 for y in graph.neighbors(x)
               if y != graph.sink and forest.is_descendant(y, x))


def descendant_edge_count(forest: SpanningForest, graph: SinkedMultigraph,
                          x: int) -> int:
    """Edge ends at x leading into x's descendant subtree.

    A self-loop contributes both ends.  On simple graphs this equals
    descendant_neighbor_count; with parallel edges it is the quantity the
    conditional height law is uniform against.
    """
    if x == graph.sink:
        raise ValueError("the sink has no descendants")
    j = 0
    for y in graph.incident_others(x):
        y = int(y)
        if y == x:
            j += 1
        elif y != graph.sink and forest.is_descendant(y, x):
            j += 1
    return j


def origin_tree_counts(d: int, r: int, samples: int, seed: int,
                       workers: int = 1):
    """Joint (descendant count, origin height) counts on the collapsed cube.

    Returns (joint, dhist, graph): joint[j, k] counts samples with j edge
    ends into the origin's descendant subtree and bijection height k at the
    origin; dhist is the histogram of descendant neighbor counts.  Both are
    exact integer arrays, so worker merges are exact.
    """
    if r < 1:
        raise ValueError("radius must be at least 1")
    if samples <= 0:
        raise ValueError("need a positive sample count")
    g = collapse_boundary(build_cube_region(d, r))
    o = g.origin_index()
    targets = np.array([o] + g.lattice_neighbor_indices(o), dtype=np.int64)

    def run(start, count):
        return _kernels.origin_joint_counts(
            g.indptr, g.inc_edge, g.inc_other, g.edge_u, g.edge_v,
            g.nv, g.sink, targets, count, np.uint64(seed), np.uint64(start))

    parts = _fan_out(run, samples, workers)
    joint = sum(p[0] for p in parts)
    dhist = sum(p[1] for p in parts)
    return joint, dhist, g


def estimate_xi_forest(d: int, r: int, samples: int, seed: int,
                       workers: int = 1) -> Estimate:
    """Forest estimator of the looping constant.

    Mean number of lattice neighbors of the origin that are its descendants
    in a wired uniform spanning tree of the radius-r cube.
    """
    joint, dhist, _ = origin_tree_counts(d, r, samples, seed, workers)
    return Estimate.from_histogram(dhist, seed)


# -- exact counts ------------------------------------------------------------

def _det_bareiss(mat) -> int:
    """Exact determinant by fraction-free elimination (list of int lists)."""
    n = len(mat)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if mat[k][k] == 0:
            for i in range(k + 1, n):
                if mat[i][k] != 0:
                    mat[k], mat[i] = mat[i], mat[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = mat[k][k]
        row_k = mat[k]
        for i in range(k + 1, n):
            row_i = mat[i]
            mik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pk - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pk
    return sign * mat[n - 1][n - 1]


def _kappa_from_edges(nv: int, edges, ground: int) -> int:
    """Spanning tree count of an arbitrary multigraph via the matrix-tree
    determinant with row/column ``ground`` removed.  Self-loops ignored."""
    idx = [i for i in range(nv) if i != ground]
    pos = {v: i for i, v in enumerate(idx)}
    n = len(idx)
    lap = [[0] * n for _ in range(n)]
    for u, v in edges:
        if u == v:
            continue
        if u != ground and v != ground:
            lap[pos[u]][pos[v]] -= 1
            lap[pos[v]][pos[u]] -= 1
        if u != ground:
            lap[pos[u]][pos[u]] += 1
        if v != ground:
            lap[pos[v]][pos[v]] += 1
    return _det_bareiss(lap)


def spanning_tree_count(graph: SinkedMultigraph) -> int:
    """Exact number of spanning trees (0 for disconnected input)."""
    if not graph.is_connected():
        return 0
    return _kappa_from_edges(graph.nv, graph.edge_list(), graph.sink)


def simple_cycles(graph: SinkedMultigraph):
    """All cycles as (vertex tuple, number of edge realizations).

    Vertex cycles of length >= 3 are canonical (smallest vertex first,
    direction fixed by second < last) and weighted by the product of edge
    multiplicities along them; parallel pairs give 2-cycles with weight
    C(mult, 2); each self-loop is a 1-cycle.
    """
    pairs, loops = graph.multiplicities()
    out = []
    for v, cnt in sorted(loops.items()):
        out.append(((v,), cnt))
    for (u, v), cnt in sorted(pairs.items()):
        if cnt >= 2:
            out.append(((u, v), comb(cnt, 2)))
    adj = {}
    for (u, v), cnt in pairs.items():
        adj.setdefault(u, []).append((v, cnt))
        adj.setdefault(v, []).append((u, cnt))
    for a in sorted(adj):
        # paths a -> ... -> back to a with interior vertices > a
        stack = [(a, [a], 1)]
        while stack:
            x, path, weight = stack.pop()
            for y, cnt in adj.get(x, ()):
                if y == a and len(path) >= 3:
                    if path[1] < path[-1]:   # one direction per cycle
                        out.append((tuple(path), weight * cnt))
                elif y > a and y not in path:
                    stack.append((y, path + [y], weight * cnt))
    return out


def _contract_vertex_set(graph: SinkedMultigraph, vertex_set):
    """Merge a vertex set into one vertex; drop edges inside the set.

    Returns (nv, edges, ground) for the contracted multigraph, with the
    merged vertex used as the determinant ground.
    """
    vs = set(vertex_set)
    relabel = {}
    nxt = 1
    for v in range(graph.nv):
        if v in vs:
            relabel[v] = 0
        else:
            relabel[v] = nxt
            nxt += 1
    edges = []
    for u, v in graph.edge_list():
        ru, rv = relabel[u], relabel[v]
        if ru == rv:
            continue
        edges.append((ru, rv))
    return nxt, edges, 0


def unicycle_count(graph: SinkedMultigraph) -> int:
    """Exact number of spanning unicycles.

    Every unicycle is its unique cycle plus a spanning tree of the graph
    with the cycle's vertex set contracted, so the count is the sum of
    kappa over contractions, weighted by edge realizations of each cycle.
    """
    if not graph.is_connected():
        raise ValueError("graph must be connected")
    total = 0
    kappa_cache = {}
    for cycle_vertices, weight in simple_cycles(graph):
        key = frozenset(cycle_vertices)
        if key not in kappa_cache:
            if len(key) == 1:
                kappa_cache[key] = spanning_tree_count(graph)
            else:
                nv, edges, ground = _contract_vertex_set(graph, key)
                kappa_cache[key] = _kappa_from_edges(nv, edges, ground)
        total += weight * kappa_cache[key]
    return total
