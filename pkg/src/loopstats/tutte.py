"""Exact Tutte polynomials for small multigraphs.

Deletion-contraction with loop and bridge base cases, memoized on a
canonical relabeling of the current minor.  All coefficients are exact
Python integers.  The edge cap exists because the recursion is
exponential; exceeding it raises instead of truncating.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from itertools import permutations, product

from .graph import SinkedMultigraph

DEFAULT_CAP = 24
_PERM_BUDGET = 720


class TutteCapExceeded(ValueError):
    """Raised when a graph has more edges than the configured cap."""


@dataclass(frozen=True)
class TuttePolynomial:
    """Two-variable polynomial as a map (i, j) -> coefficient of x^i y^j."""

    coeffs: tuple   # sorted tuple of ((i, j), coeff)

    @staticmethod
    def from_dict(d) -> "TuttePolynomial":
        return TuttePolynomial(tuple(sorted((k, v) for k, v in d.items() if v)))

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def evaluate(self, x, y):
        return sum(c * Fraction(x) ** i * Fraction(y) ** j
                   for (i, j), c in self.coeffs)

    def t11(self) -> int:
        """T(1,1): the spanning tree count."""
        return sum(c for _, c in self.coeffs)

    def dy_at_11(self) -> int:
        """dT/dy at (1,1): the spanning unicycle count."""
        return sum(j * c for (_, j), c in self.coeffs)

    def at_x1(self) -> dict:
        """Coefficients of the univariate polynomial T(1, y)."""
        out = Counter()
        for (_, j), c in self.coeffs:
            out[j] += c
        return dict(out)

    def monomial_lines(self) -> str:
        return "\n".join(f"{c} x^{i} y^{j}" for (i, j), c in self.coeffs) + "\n"

    def to_json_map(self) -> dict:
        return {f"{i},{j}": c for (i, j), c in self.coeffs}


def _poly_shift(p: dict, dx: int, dy: int) -> dict:
    return {(i + dx, j + dy): c for (i, j), c in p.items()}


def _poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


def _refined_colors(nv, pair_mult, loops):
    colors = {v: 0 for v in range(nv)}
    init = {v: (sum(c for (a, b), c in pair_mult.items() if v in (a, b)),
                loops.get(v, 0)) for v in range(nv)}
    ranks = {c: i for i, c in enumerate(sorted(set(init.values())))}
    colors = {v: ranks[init[v]] for v in range(nv)}
    adj = {v: [] for v in range(nv)}
    for (a, b), c in pair_mult.items():
        adj[a].append((b, c))
        adj[b].append((a, c))
    while True:
        sig = {v: (colors[v], tuple(sorted((colors[u], c) for u, c in adj[v])))
               for v in range(nv)}
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {v: ranks[sig[v]] for v in range(nv)}
        if new == colors:
            return colors
        colors = new


def _canonical_key(nv, edges):
    """Relabeling-invariant key when the color cells are small.

    Color-refine, then try all label orders within color cells (up to a
    budget) and keep the lexicographically smallest edge encoding.  Over
    budget, one deterministic labeling is used; keys then separate some
    isomorphic minors, which only costs cache hits, never correctness.
    """
    pair_mult = Counter()
    loops = Counter()
    for u, v in edges:
        if u == v:
            loops[u] += 1
        else:
            pair_mult[(min(u, v), max(u, v))] += 1
    colors = _refined_colors(nv, pair_mult, loops)
    cells = {}
    for v in range(nv):
        cells.setdefault(colors[v], []).append(v)
    ordered_cells = [sorted(cells[c]) for c in sorted(cells)]

    def encode(label):
        enc = sorted((min(label[u], label[v]), max(label[u], label[v]))
                     for u, v in edges)
        return tuple(enc)

    budget = 1
    for cell in ordered_cells:
        budget *= factorial(len(cell))
        if budget > _PERM_BUDGET:
            break
    if budget > _PERM_BUDGET:
        label = {}
        nxt = 0
        for cell in ordered_cells:
            for v in cell:
                label[v] = nxt
                nxt += 1
        return (nv, encode(label))

    best = None
    for perm_choice in product(*(permutations(cell) for cell in ordered_cells)):
        label = {}
        nxt = 0
        for cell_perm in perm_choice:
            for v in cell_perm:
                label[v] = nxt
                nxt += 1
        enc = encode(label)
        if best is None or enc < best:
            best = enc
    return (nv, best)


def _is_bridge(nv, edges, eid) -> bool:
    u0, v0 = edges[eid]
    mult = sum(1 for (a, b) in edges
               if (min(a, b), max(a, b)) == (min(u0, v0), max(u0, v0)))
    if mult > 1:
        return False
    adj = {v: set() for v in range(nv)}
    for i, (a, b) in enumerate(edges):
        if i == eid or a == b:
            continue
        adj[a].add(b)
        adj[b].add(a)
    seen = {u0}
    stack = [u0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return v0 not in seen


def _contract(nv, edges, eid):
    u, v = edges[eid]
    keep, lost = min(u, v), max(u, v)
    out = []
    for i, (a, b) in enumerate(edges):
        if i == eid:
            continue
        a = keep if a == lost else (a if a < lost else a - 1)
        b = keep if b == lost else (b if b < lost else b - 1)
        out.append((a, b))
    return nv - 1, tuple(out)


def _tutte_rec(nv, edges, memo) -> dict:
    if not edges:
        return {(0, 0): 1}
    key = _canonical_key(nv, edges)
    hit = memo.get(key)
    if hit is not None:
        return hit
    eid = next((i for i, (a, b) in enumerate(edges) if a == b), None)
    if eid is not None:                      # loop: factor y
        rest = edges[:eid] + edges[eid + 1:]
        result = _poly_shift(_tutte_rec(nv, rest, memo), 0, 1)
    elif _is_bridge(nv, edges, 0):           # bridge: factor x, contract
        nv2, rest = _contract(nv, edges, 0)
        result = _poly_shift(_tutte_rec(nv2, rest, memo), 1, 0)
    else:                                    # delete + contract
        deleted = _tutte_rec(nv, edges[1:], memo)
        nv2, rest = _contract(nv, edges, 0)
        contracted = _tutte_rec(nv2, rest, memo)
        result = _poly_add(deleted, contracted)
    memo[key] = result
    return result


def tutte_polynomial(graph: SinkedMultigraph, cap: int = DEFAULT_CAP) -> TuttePolynomial:
    """Exact Tutte polynomial of a connected multigraph with at most ``cap`` edges."""
    if graph.n_edges > cap:
        raise TutteCapExceeded(
            f"{graph.n_edges} edges exceeds the cap of {cap}")
    if not graph.is_connected():
        raise ValueError("graph must be connected")
    edges = tuple(sorted((min(int(u), int(v)), max(int(u), int(v)))
                         for u, v in graph.edge_list()))
    return TuttePolynomial.from_dict(_tutte_rec(graph.nv, edges, {}))


def tutte_t11_and_dy(graph: SinkedMultigraph, cap: int = DEFAULT_CAP):
    """(spanning tree count, spanning unicycle count) read off the polynomial."""
    t = tutte_polynomial(graph, cap=cap)
    return t.t11(), t.dy_at_11()


def merino_check(graph: SinkedMultigraph, cap: int = 16):
    """Compare T(1,y) against the recurrent-sandpile generating function.

    The identity is T(1,y) * y^(m - delta) = sum over recurrent piles of
    y^(total particles), with delta the sink degree.  Exact equality of
    coefficient maps is required.  Returns (ok, report).
    """
    if graph.n_edges > cap:
        raise TutteCapExceeded(
            f"{graph.n_edges} edges exceeds the merino cap of {cap}")
    from .exhaustive import recurrent_piles

    t1y = tutte_polynomial(graph, cap=cap).at_x1()
    m = graph.n_edges
    delta = graph.degree(graph.sink)
    lhs = {j + m - delta: c for j, c in t1y.items()}
    gen = Counter()
    for pile in recurrent_piles(graph):
        gen[sum(pile)] += 1
    ok = lhs == dict(gen)
    return ok, {"tutte_side": lhs, "sandpile_side": dict(gen)}


def mean_height_identity_check(graph: SinkedMultigraph, cap: int = 16):
    """Check mean recurrent height == (m - delta + u/kappa) / n exactly.

    n counts every vertex including the sink; both sides are exact
    rationals.  Returns (ok, report).
    """
    if graph.n_edges > cap:
        raise TutteCapExceeded(
            f"{graph.n_edges} edges exceeds the cap of {cap}")
    from .exhaustive import recurrent_piles
    from .spanning import spanning_tree_count, unicycle_count

    piles = recurrent_piles(graph)
    kappa = spanning_tree_count(graph)
    u = unicycle_count(graph)
    assert len(piles) == kappa
    n = graph.nv
    m = graph.n_edges
    delta = graph.degree(graph.sink)
    lhs = Fraction(sum(sum(p) for p in piles), n * kappa)
    rhs = (m - delta + Fraction(u, kappa)) / n
    return lhs == rhs, {"direct_mean": lhs, "tutte_mean": rhs,
                        "kappa": kappa, "unicycles": u}
