"""Exact-identity verification suite.

Runs every exact cross-check the package knows about on a fixed corpus of
small graphs plus seeded random multigraphs: determinant counts against
subset enumeration, the Tutte recursion against the subset expansion, the
sandpile generating-function identity, the mean-height identity, the
cycle-sum identity, the degree/girth bound, bijectivity of the
tree-to-pile map, and exhaustive conditional uniformity of heights given
descendant counts.  Any failure names the check and serializes the
offending graph.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exhaustive import (recurrent_piles, spanning_trees_brute,
                         tutte_subset_oracle, unicycles_brute)
from .graph import SinkedMultigraph, collapse_boundary, from_edges, to_edge_list_text
from .lattice import Region, build_cube_region
from .rng import RandomStream
from .sandpile import burning_bijection
from .spanning import (SpanningForest, descendant_edge_count,
                       spanning_tree_count, unicycle_count)
from .tutte import TuttePolynomial, merino_check, mean_height_identity_check, tutte_polynomial
from .unicycle import check_cycle_bound, exact_expected_cycle


def forest_from_edge_ids(graph: SinkedMultigraph, edge_ids) -> SpanningForest:
    """Orient a spanning tree (given as edge ids) toward the sink."""
    adj = {v: [] for v in range(graph.nv)}
    for eid in edge_ids:
        u, v = graph.edge_endpoints(eid)
        adj[u].append((eid, v))
        adj[v].append((eid, u))
    parent = np.full(graph.nv, -2, dtype=np.int64)
    parent[graph.sink] = -1
    stack = [graph.sink]
    while stack:
        x = stack.pop()
        for eid, y in adj[x]:
            if parent[y] == -2:
                parent[y] = eid
                stack.append(y)
    if (parent == -2).any():
        raise ValueError("edge set does not span the graph")
    return SpanningForest(graph, parent)


# -- individual checks -------------------------------------------------------

def check_counts_vs_brute(graph) -> dict:
    trees = spanning_trees_brute(graph)
    unis = unicycles_brute(graph)
    kappa = spanning_tree_count(graph)
    u = unicycle_count(graph)
    return {
        "kappa-determinant-vs-brute": kappa == len(trees),
        "unicycles-contraction-vs-brute": u == len(unis),
    }


def check_tutte(graph) -> dict:
    poly = tutte_polynomial(graph)
    oracle = TuttePolynomial.from_dict(tutte_subset_oracle(graph))
    kappa = spanning_tree_count(graph)
    u = unicycle_count(graph)
    return {
        "tutte-recursion-vs-subset": poly == oracle,
        "tutte-t11-is-kappa": poly.t11() == kappa,
        "tutte-dy11-is-unicycles": poly.dy_at_11() == u,
        "tutte-t22-is-2^m": poly.evaluate(2, 2) == 2**graph.n_edges,
    }


def check_cycle_sum(graph) -> dict:
    unis = unicycles_brute(graph)
    kappa = spanning_tree_count(graph)
    m, n = graph.n_edges, graph.nv
    total = sum(length for _, length in unis)
    out = {"cycle-sum-identity": total == (m - n + 1) * kappa}
    if unis:
        exact = exact_expected_cycle(graph)
        out["expected-cycle-formula"] = exact == Fraction(total, len(unis))
    return out


def check_girth_bound(graph) -> dict:
    res = check_cycle_bound(graph)
    if res is None:
        return {}
    _, _, ok = res
    return {"cycle-length-bound": ok}


def check_tree_pile_exhaustive(graph) -> dict:
    """One pass over all spanning trees: bijectivity plus conditional uniformity.

    The tree-to-pile map must be injective with image exactly the recurrent
    set, and for every vertex the height counts given the descendant edge
    count j must be equal across {j, ..., deg-1} (the exact form of the
    conditional uniformity statement).
    """
    trees = spanning_trees_brute(graph)
    piles = set()
    joints = {x: Counter() for x in range(graph.nv) if x != graph.sink}
    for t in trees:
        forest = forest_from_edge_ids(graph, t)
        pile = burning_bijection(forest, graph)
        piles.add(tuple(pile.heights))
        for x, joint in joints.items():
            j = descendant_edge_count(forest, graph, x)
            joint[(j, pile.heights[x])] += 1
    recurrent = set(recurrent_piles(graph))
    uniform = True
    for x, joint in joints.items():
        deg = graph.degree(x)
        by_j = Counter()
        for (j, k), c in joint.items():
            if k < j or k > deg - 1:
                uniform = False
            by_j[j] += c
        for j, total in by_j.items():
            width = deg - j
            if total % width != 0:
                uniform = False
                continue
            expect = total // width
            for k in range(j, deg):
                if joint.get((j, k), 0) != expect:
                    uniform = False
    return {
        "bijection-injective": len(piles) == len(trees),
        "bijection-image-is-recurrent-set": piles == recurrent,
        "conditional-height-uniformity": uniform,
    }


def check_merino(graph) -> dict:
    ok, _ = merino_check(graph)
    return {"merino-identity": ok}


def check_mean_height(graph) -> dict:
    ok, _ = mean_height_identity_check(graph)
    return {"mean-height-identity": ok}


# -- corpus and fuzzing --------------------------------------------------------

def corpus() -> list[tuple[str, SinkedMultigraph]]:
    triangle = [(0, 1), (1, 2), (0, 2)]
    c4 = [(0, 1), (1, 2), (2, 3), (3, 0)]
    k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    graphs = [
        ("triangle-sink0", from_edges(triangle, sink=0)),
        ("triangle-sink1", from_edges(triangle, sink=1)),
        ("c4-sink0", from_edges(c4, sink=0)),
        ("c4-sink2", from_edges(c4, sink=2)),
        ("k4-sink0", from_edges(k4, sink=0)),
        ("collapse-1site-d2", collapse_boundary(build_cube_region(2, 0))),
        ("collapse-1site-d3", collapse_boundary(build_cube_region(3, 0))),
        ("collapse-2x1-d2", collapse_boundary(
            Region.from_sites(2, [(0, 0), (1, 0)]))),
        ("collapse-3x1-d2", collapse_boundary(
            Region.from_sites(2, [(0, 0), (1, 0), (2, 0)]))),
        ("collapse-2x2-d2", collapse_boundary(
            Region.from_sites(2, [(0, 0), (1, 0), (0, 1), (1, 1)]))),
        ("collapse-3x3-d2", collapse_boundary(build_cube_region(2, 1))),
    ]
    return graphs


def random_multigraph(stream: RandomStream, max_edges: int) -> SinkedMultigraph:
    """Random connected multigraph: spanning tree plus extra edges.

    Parallel edges arise freely; self-loops appear with small probability
    at non-sink vertices.  The sink is vertex 0.
    """
    nv = 2 + stream.randint(5)
    edges = []
    for v in range(1, nv):
        edges.append((stream.randint(v), v))
    extra = stream.randint(max(max_edges - len(edges), 1) + 1)
    for _ in range(extra):
        if stream.randint(10) == 0 and nv > 1:
            v = 1 + stream.randint(nv - 1)
            edges.append((v, v))
        else:
            u = stream.randint(nv)
            v = stream.randint(nv)
            if u == v:
                v = (v + 1) % nv
            edges.append((u, v))
    return from_edges(edges, sink=0, nv=nv)


@dataclass
class VerificationReport:
    ok: bool = True
    lines: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def record(self, graph_name, graph, results: dict):
        for check, passed in results.items():
            self.lines.append(f"{'PASS' if passed else 'FAIL'} {graph_name} {check}")
            if not passed:
                self.ok = False
                self.failures.append({
                    "graph": graph_name,
                    "check": check,
                    "edge_list": to_edge_list_text(graph),
                })

    def text(self) -> str:
        out = list(self.lines)
        for f in self.failures:
            out.append(f"FAILURE DETAIL {f['graph']} {f['check']}")
            out.append(f["edge_list"].rstrip())
        out.append(f"verification: {'OK' if self.ok else 'FAILED'} "
                   f"({len(self.lines)} checks, {len(self.failures)} failures)")
        return "\n".join(out) + "\n"


def run_verification_suite(fuzz: int = 200, max_edges: int = 12,
                           seed: int = 20251221) -> VerificationReport:
    """All exact identities on the corpus plus ``fuzz`` random multigraphs."""
    report = VerificationReport()
    stream = RandomStream(seed)
    jobs = corpus()
    for i in range(fuzz):
        jobs.append((f"fuzz-{i:03d}", random_multigraph(stream.split(i), max_edges)))

    for name, g in jobs:
        m = g.n_edges
        results = {}
        if m <= max_edges:
            results.update(check_counts_vs_brute(g))
            results.update(check_cycle_sum(g))
            results.update(check_tree_pile_exhaustive(g))
            results.update(check_tutte(g))
        if m <= 16:
            results.update(check_merino(g))
            results.update(check_mean_height(g))
        results.update(check_girth_bound(g))
        report.record(name, g, results)
    return report
