"""Spanning unicycles: sampling, the mean-cycle-length estimator, exact ratios.

A spanning tree plus a uniform non-tree edge is a spanning unicycle whose
law is the uniform one biased by cycle length (a length-k unicycle arises
from k different tree/edge pairs).  The reciprocal therefore debiases
exactly: under the biased law, E[1/length] = 1 / E_uniform[length], so the
estimator of the uniform mean cycle length is the inverse sample mean of
reciprocal lengths, with the delta-method standard error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from . import _kernels
from .estimates import Estimate
from .graph import SinkedMultigraph, collapse_boundary
from .lattice import build_cube_region
from .rng import as_stream
from .spanning import SpanningForest, spanning_tree_count, unicycle_count, wilson_ust
from .walks import _fan_out


@dataclass(frozen=True)
class Unicycle:
    """Spanning unicycle: tree edges plus one extra edge, and its cycle."""

    edges: frozenset        # edge ids, exactly nv - sink-count ... = #vertices
    extra_edge: int
    cycle_vertices: tuple   # the unique cycle, in order

    @property
    def cycle_length(self) -> int:
        return len(self.cycle_vertices)


def sample_ustplus(graph: SinkedMultigraph, rng) -> Unicycle:
    """Tree plus uniform non-tree edge (cycle-length-biased unicycle law).

    Rejection keeps the pair exact: a fresh tree and a fresh uniform edge
    per attempt, accepted when the edge misses the tree; acceptance
    probability is the same for every tree, so the accepted tree stays
    uniform.
    """
    m = graph.n_edges
    n = graph.nv
    if m < n:
        raise ValueError("a tree graph has no spanning unicycle")
    stream = as_stream(rng)
    attempt = 0
    while True:
        forest = wilson_ust(graph, stream.seed, index=attempt)
        attempt += 1
        f = stream.randint(m)
        u, v = graph.edge_endpoints(f)
        if u == v:
            return Unicycle(edges=frozenset(forest.edges()) | {f},
                            extra_edge=f, cycle_vertices=(u,))
        if any(x != graph.sink and int(forest.parent_edge[x]) == f for x in (u, v)):
            continue
        cycle = _tree_cycle(forest, u, v)
        return Unicycle(edges=frozenset(forest.edges()) | {f},
                        extra_edge=f, cycle_vertices=tuple(cycle))


def _tree_cycle(forest: SpanningForest, u: int, v: int) -> list[int]:
    """Vertices of the cycle closed by adding edge (u, v) to the tree."""
    depths = forest.depths()
    up_u, up_v = [u], [v]
    a, b = u, v
    da, db = int(depths[a]), int(depths[b])
    while da > db:
        a = forest.parent_vertex(a)
        da -= 1
        up_u.append(a)
    while db > da:
        b = forest.parent_vertex(b)
        db -= 1
        up_v.append(b)
    while a != b:
        a = forest.parent_vertex(a)
        b = forest.parent_vertex(b)
        up_u.append(a)
        up_v.append(b)
    # up_u ends at the meet point; drop it from one side
    return up_u + up_v[-2::-1]


def cycle_length_histogram(graph: SinkedMultigraph, samples: int, seed: int,
                           workers: int = 1):
    """Exact integer histogram of cycle lengths over tree-plus-edge draws."""
    if samples <= 0:
        raise ValueError("need a positive sample count")
    if graph.n_edges < graph.nv:
        raise ValueError("a tree graph has no spanning unicycle")

    def run(start, count):
        hist, _ = _kernels.ustplus_cycle_counts(
            graph.indptr, graph.inc_edge, graph.inc_other,
            graph.edge_u, graph.edge_v, graph.nv, graph.sink,
            count, np.uint64(seed), np.uint64(start))
        return hist

    return sum(_fan_out(run, samples, workers))


def lambda_from_histogram(hist, samples: int, seed: int) -> Estimate:
    """Invert the pooled mean reciprocal cycle length (delta-method stderr)."""
    lengths = np.nonzero(hist)[0]
    counts = hist[lengths]
    recip_sum = sum(Fraction(int(c), int(length))
                    for length, c in zip(lengths, counts))
    recip_sq_sum = sum(Fraction(int(c), int(length) ** 2)
                       for length, c in zip(lengths, counts))
    n = int(counts.sum())
    assert n == samples
    rbar = recip_sum / n
    lam = 1.0 / float(rbar)
    if n > 1:
        var_r = float((recip_sq_sum - recip_sum * rbar) / (n - 1))
        se = sqrt(max(var_r, 0.0) / n) / float(rbar) ** 2
    else:
        se = float("inf")
    return Estimate(mean=lam, stderr=se, count=n, seed=seed,
                    sum=recip_sum, sumsq=recip_sq_sum)


def estimate_lambda(d: int, r: int, samples: int, seed: int,
                    workers: int = 1) -> Estimate:
    """Mean cycle length of a uniform spanning unicycle of the radius-r cube."""
    if r < 1:
        raise ValueError("radius must be at least 1")
    g = collapse_boundary(build_cube_region(d, r))
    hist = cycle_length_histogram(g, samples, seed, workers)
    return lambda_from_histogram(hist, samples, seed)


def exact_expected_cycle(graph: SinkedMultigraph) -> Fraction:
    """Exact mean cycle length (m - n + 1) * kappa / u of the uniform unicycle."""
    m, n = graph.n_edges, graph.nv
    if m < n:
        raise ValueError("a tree graph has no spanning unicycle")
    kappa = spanning_tree_count(graph)
    u = unicycle_count(graph)
    return Fraction((m - n + 1) * kappa, u)


# -- the degree/girth bound --------------------------------------------------

def edge_girth(graph: SinkedMultigraph):
    """Smallest g such that every edge lies on a cycle of length <= g.

    None when some edge lies on no cycle (bridges make the bound vacuous).
    Self-loops are 1-cycles; parallel pairs are 2-cycles.
    """
    pairs, loops = graph.multiplicities()
    worst = 0
    for eid in range(graph.n_edges):
        u, v = graph.edge_endpoints(eid)
        if u == v:
            g = 1
        elif pairs.get((min(u, v), max(u, v)), 0) >= 2:
            g = 2
        else:
            g = _shortest_cycle_through(graph, u, v)
            if g is None:
                return None
        worst = max(worst, g)
    return worst


def _shortest_cycle_through(graph: SinkedMultigraph, u: int, v: int):
    """Length of the shortest cycle using edge (u, v): BFS avoiding that pair."""
    from collections import deque

    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in graph.neighbors(x):
            if {x, y} == {u, v}:
                continue
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    if v not in dist:
        return None
    return dist[v] + 1


def cycle_length_bound(max_degree: int, g: int) -> int:
    """The bound g * d * (d-1)^(g-2) on the mean unicycle cycle length."""
    return g * max_degree * (max_degree - 1) ** max(g - 2, 0)


def check_cycle_bound(graph: SinkedMultigraph):
    """(exact mean cycle length, bound, ok) for a bridgeless graph, else None."""
    g = edge_girth(graph)
    if g is None:
        return None
    dmax = max(graph.degree(x) for x in range(graph.nv))
    bound = cycle_length_bound(dmax, g)
    mean = exact_expected_cycle(graph)
    return mean, bound, mean <= bound
