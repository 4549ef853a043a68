"""Abelian sandpile dynamics and the tree-to-sandpile bijection.

A sandpile assigns a non-negative particle count to every non-sink vertex.
A vertex with at least as many particles as edge ends topples, sending one
particle along each incident edge end (self-loops return two, particles
reaching the sink vanish).  The stable result does not depend on the order
of topplings.

Recurrence is decided by the burning test: starting from the sink, burn
any vertex whose height reaches its number of edge ends into still-unburnt
non-sink vertices; the pile is recurrent exactly when everything burns.

The bijection from spanning trees to recurrent piles reads, at each vertex
x with tree depth l(x) and parent edge e(x),

    height(x) = deg(x) - 1 - #{edge ends (x,y): l(y) < l(x)-1}
                           - #{edge ends (x,y): l(y) = l(x)-1, (x,y) before e(x)}

with l(sink) = 0 and the per-vertex canonical edge order deciding
"before".  Composing Wilson's algorithm with this map samples exactly
uniform recurrent piles without any mixing-time argument.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import SinkedMultigraph
from .rng import as_stream
from .spanning import SpanningForest


@dataclass(frozen=True)
class Sandpile:
    """Particle counts per vertex; the sink entry is identically zero."""

    heights: tuple

    @staticmethod
    def from_array(heights, sink) -> "Sandpile":
        h = list(int(v) for v in heights)
        h[sink] = 0
        return Sandpile(heights=tuple(h))

    def height(self, x: int) -> int:
        return self.heights[x]

    def total(self) -> int:
        return sum(self.heights)

    def is_stable(self, graph: SinkedMultigraph) -> bool:
        return all(self.heights[x] < graph.degree(x)
                   for x in range(graph.nv) if x != graph.sink)


def stabilize(pile: Sandpile, graph: SinkedMultigraph):
    """Topple until stable; returns (stable pile, per-vertex toppling counts).

    Unstable vertices are processed from a work queue, toppling
    floor(height/degree) times at once; the abelian property makes the
    result independent of the batching and ordering.
    """
    h = list(pile.heights)
    topples = [0] * graph.nv
    queue = deque(x for x in range(graph.nv)
                  if x != graph.sink and h[x] >= graph.degree(x))
    queued = set(queue)
    while queue:
        x = queue.popleft()
        queued.discard(x)
        deg = graph.degree(x)
        k = h[x] // deg
        if k == 0:
            continue
        h[x] -= k * deg
        topples[x] += k
        for y in graph.incident_others(x):
            y = int(y)
            if y == graph.sink:
                continue
            h[y] += k
            if h[y] >= graph.degree(y) and y not in queued:
                queue.append(y)
                queued.add(y)
        if h[x] >= deg and x not in queued:
            queue.append(x)
            queued.add(x)
    out = Sandpile(heights=tuple(h))
    assert out.is_stable(graph)
    return out, topples


def _burn(pile: Sandpile, graph: SinkedMultigraph, lifo: bool) -> bool:
    unburnt_edges = [0] * graph.nv
    for x in range(graph.nv):
        if x == graph.sink:
            continue
        unburnt_edges[x] = sum(1 for y in graph.incident_others(x)
                               if int(y) != graph.sink)
    burnt = [False] * graph.nv
    burnt[graph.sink] = True
    frontier = [x for x in range(graph.nv)
                if x != graph.sink and pile.heights[x] >= unburnt_edges[x]]
    queue = deque(frontier)
    remaining = graph.nv - 1
    while queue:
        x = queue.pop() if lifo else queue.popleft()
        if burnt[x]:
            continue
        if pile.heights[x] < unburnt_edges[x]:
            continue
        burnt[x] = True
        remaining -= 1
        for y in graph.incident_others(x):
            y = int(y)
            if y == graph.sink or burnt[y]:
                continue
            unburnt_edges[y] -= 1
            if pile.heights[y] >= unburnt_edges[y]:
                queue.append(y)
    return remaining == 0


def is_recurrent(pile: Sandpile, graph: SinkedMultigraph) -> bool:
    """Dhar's burning test.  Requires a stable pile."""
    if not pile.is_stable(graph):
        raise ValueError("burning test requires a stable pile")
    result = _burn(pile, graph, lifo=False)
    if __debug__:
        assert result == _burn(pile, graph, lifo=True)
    return result


def burning_bijection(forest: SpanningForest, graph: SinkedMultigraph) -> Sandpile:
    """Map a spanning tree to its recurrent sandpile."""
    depths = forest.depths()
    h = [0] * graph.nv
    for x in range(graph.nv):
        if x == graph.sink:
            continue
        lo = depths[x]
        eo = int(forest.parent_edge[x])
        a = b = 0
        seen_parent = False
        base = graph.indptr[x]
        for i in range(base, graph.indptr[x + 1]):
            y = int(graph.inc_other[i])
            e = int(graph.inc_edge[i])
            if e == eo and not seen_parent and y != x:
                seen_parent = True
                continue
            if y == x:
                continue
            ly = 0 if y == graph.sink else int(depths[y])
            if ly < lo - 1:
                a += 1
            elif ly == lo - 1 and not seen_parent:
                b += 1
        h[x] = graph.degree(x) - 1 - a - b
    pile = Sandpile(heights=tuple(h))
    if __debug__:
        assert is_recurrent(pile, graph)
    return pile


def sample_recurrent(graph: SinkedMultigraph, seed: int, index: int = 0) -> Sandpile:
    """Exactly uniform recurrent sandpile (Wilson tree through the bijection)."""
    if not graph.is_connected():
        raise ValueError("graph must be connected")
    heights = _kernels.single_recurrent_pile(
        graph.indptr, graph.inc_edge, graph.inc_other,
        graph.edge_u, graph.edge_v, graph.nv, graph.sink,
        np.uint64(seed), np.uint64(index))
    return Sandpile.from_array(heights, graph.sink)


def markov_step(pile: Sandpile, graph: SinkedMultigraph, rng) -> Sandpile:
    """Add one particle at a uniform non-sink vertex, then stabilize."""
    if not pile.is_stable(graph):
        raise ValueError("chain state must be stable")
    stream = as_stream(rng)
    non_sink = [x for x in range(graph.nv) if x != graph.sink]
    x = non_sink[stream.randint(len(non_sink))]
    h = list(pile.heights)
    h[x] += 1
    out, _ = stabilize(Sandpile(heights=tuple(h)), graph)
    return out


def conditional_height_law(graph: SinkedMultigraph, vertex: int,
                           draws: int, seed: int) -> np.ndarray:
    """Joint counts of (descendant edge count, height) at one vertex.

    Row j, column k counts draws where the uniform spanning tree put j edge
    ends into the vertex's descendant subtree and the bijection height was
    k.  Conditioned on j, the height is uniform on {j, ..., deg-1}.
    """
    if vertex == graph.sink:
        raise ValueError("the sink carries no height")
    targets = np.array([vertex] + [y for y in graph.neighbors(vertex)
                                   if y != graph.sink], dtype=np.int64)
    joint, _ = _kernels.origin_joint_counts(
        graph.indptr, graph.inc_edge, graph.inc_other,
        graph.edge_u, graph.edge_v, graph.nv, graph.sink,
        targets, draws, np.uint64(seed), np.uint64(0))
    return joint


# -- snapshots ---------------------------------------------------------------

def pile_to_text_grid(pile: Sandpile, graph: SinkedMultigraph) -> str:
    """Two-dimensional height snapshot as a text grid (rows are x2 slices)."""
    region = graph.region
    if region is None or region.d != 2:
        raise ValueError("text grids are for d=2 lattice graphs")
    xs = sorted({s[0] for s in region.sites})
    ys = sorted({s[1] for s in region.sites})
    rows = []
    for y in reversed(ys):
        row = []
        for x in xs:
            if (x, y) in region:
                row.append(str(pile.heights[region.index((x, y))]))
            else:
                row.append(".")
        rows.append(" ".join(row))
    return "\n".join(rows) + "\n"


def pile_to_csv(pile: Sandpile, graph: SinkedMultigraph) -> str:
    """Flat snapshot 'x1,...,xd,height', one non-sink vertex per line."""
    region = graph.region
    if region is None:
        raise ValueError("csv snapshots are for lattice graphs")
    header = ",".join(f"x{i+1}" for i in range(region.d)) + ",height"
    lines = [header]
    for i, site in enumerate(region.sites):
        lines.append(",".join(map(str, site)) + f",{pile.heights[i]}")
    return "\n".join(lines) + "\n"
