"""Brute-force enumerations used as oracles by the verification suite.

Everything here is deliberately naive: subset scans and full product
enumerations whose correctness is obvious.  The fast implementations are
tested against these on small graphs, never the other way around.
"""

from __future__ import annotations

import itertools
from collections import deque
from math import comb

from .graph import SinkedMultigraph
from .sandpile import Sandpile, is_recurrent


def _component_count(nv, endpoint_pairs) -> int:
    parent = list(range(nv))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = nv
    for u, v in endpoint_pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps


def spanning_trees_brute(graph: SinkedMultigraph) -> list[tuple[int, ...]]:
    """All spanning trees as sorted tuples of edge ids (subset scan)."""
    edges = graph.edge_list()
    n = graph.nv
    out = []
    for sub in itertools.combinations(range(len(edges)), n - 1):
        if _component_count(n, [edges[i] for i in sub]) == 1:
            out.append(sub)
    return out


def unicycles_brute(graph: SinkedMultigraph) -> list[tuple[tuple[int, ...], int]]:
    """All spanning unicycles as (edge ids, cycle length) by subset scan."""
    edges = graph.edge_list()
    n = graph.nv
    out = []
    for sub in itertools.combinations(range(len(edges)), n):
        pairs = [edges[i] for i in sub]
        if _component_count(n, pairs) != 1:
            continue
        # strip leaves; the surviving edges form the unique cycle
        deg = [0] * n
        adj = [[] for _ in range(n)]
        for ei in sub:
            u, v = edges[ei]
            deg[u] += 1
            deg[v] += 1
            adj[u].append((ei, v))
            adj[v].append((ei, u))
        removed = set()
        queue = deque(v for v in range(n) if deg[v] == 1)
        while queue:
            v = queue.popleft()
            for ei, w in adj[v]:
                if ei not in removed and deg[v] == 1:
                    removed.add(ei)
                    deg[v] -= 1
                    deg[w] -= 1
                    if deg[w] == 1:
                        queue.append(w)
        out.append((sub, len(sub) - len(removed)))
    return out


def tutte_subset_oracle(graph: SinkedMultigraph) -> dict:
    """Tutte coefficients straight from the subset expansion.

    Sums (x-1)^(c(A)-1) (y-1)^(c(A)+|A|-n) over all edge subsets A, using
    binomial expansion into monomials; exact integers throughout.
    """
    edges = graph.edge_list()
    n = graph.nv
    coeffs = {}
    for size in range(len(edges) + 1):
        for sub in itertools.combinations(range(len(edges)), size):
            c = _component_count(n, [edges[i] for i in sub])
            a = c - 1
            b = c + size - n
            for p in range(a + 1):
                for q in range(b + 1):
                    sgn = -1 if (a - p + b - q) % 2 else 1
                    key = (p, q)
                    coeffs[key] = coeffs.get(key, 0) + sgn * comb(a, p) * comb(b, q)
    return {k: v for k, v in coeffs.items() if v}


def stable_piles(graph: SinkedMultigraph):
    """Iterate all stable piles as height tuples (sink entry zero)."""
    ranges = []
    for x in range(graph.nv):
        ranges.append(range(1) if x == graph.sink else range(graph.degree(x)))
    total = 1
    for r in ranges:
        total *= len(r)
    if total > 4_000_000:
        raise ValueError(f"{total} stable piles is too many to enumerate")
    yield from itertools.product(*ranges)


def recurrent_piles(graph: SinkedMultigraph) -> list[tuple[int, ...]]:
    """All recurrent piles as height tuples, by filtering the stable ones."""
    out = []
    for h in stable_piles(graph):
        if is_recurrent(Sandpile(heights=h), graph):
            out.append(h)
    return out
