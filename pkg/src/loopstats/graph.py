"""Sinked multigraphs: finite multigraphs with a distinguished sink vertex.

Parallel edges are first-class (each edge has its own id); self-loops are
allowed anywhere except at the sink.  Every non-sink vertex carries a fixed
total order of its incident edges.  For graphs built by collapsing the
complement of a lattice region, that order is direction-then-slot
(+e1, -e1, +e2, -e2, ...); for graphs built from explicit edge lists it is
edge-id order.  The order is deterministic and stable across runs.

Incidence is stored CSR-style in numpy arrays so the Monte Carlo kernels
can walk the graph without touching Python objects.
"""

from __future__ import annotations

import numpy as np

from .lattice import Region, directions


class SinkedMultigraph:
    """Connected multigraph with sink, parallel edges, ordered incidences.

    Attributes
    ----------
    nv : total number of vertices (sink included)
    sink : index of the sink vertex
    edge_u, edge_v : int64 arrays, endpoints of edge i
    indptr, inc_edge, inc_other : CSR half-edge arrays; the slice
        ``inc_edge[indptr[x]:indptr[x+1]]`` lists x's incident edges in
        x's canonical order (a self-loop contributes two entries)
    region : the lattice Region this graph collapses, if any
    """

    def __init__(self, nv, sink, edges, incident=None, region=None):
        if nv < 2:
            raise ValueError("need at least two vertices (one non-sink plus the sink)")
        if not 0 <= sink < nv:
            raise ValueError("sink index out of range")
        edges = [(int(u), int(v)) for u, v in edges]
        for u, v in edges:
            if not (0 <= u < nv and 0 <= v < nv):
                raise ValueError(f"edge ({u},{v}) out of range")
            if u == v == sink:
                raise ValueError("self-loops at the sink are not allowed")
        self.nv = int(nv)
        self.sink = int(sink)
        self.edge_u = np.array([e[0] for e in edges], dtype=np.int64)
        self.edge_v = np.array([e[1] for e in edges], dtype=np.int64)
        self.region = region

        if incident is None:
            incident = [[] for _ in range(nv)]
            for eid, (u, v) in enumerate(edges):
                incident[u].append(eid)
                incident[v].append(eid)   # loop: two entries at the same vertex
        counts = np.array([len(lst) for lst in incident], dtype=np.int64)
        self.indptr = np.zeros(nv + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.inc_edge = np.empty(self.indptr[-1], dtype=np.int64)
        self.inc_other = np.empty(self.indptr[-1], dtype=np.int64)
        loop_seen = {}
        for x in range(nv):
            base = self.indptr[x]
            for k, eid in enumerate(incident[x]):
                u, v = edges[eid]
                self.inc_edge[base + k] = eid
                self.inc_other[base + k] = v if u == x else u
        if self.indptr[-1] != 2 * len(edges):
            raise ValueError("incident lists must cover every edge end exactly once")

    # -- basic queries ----------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    def degree(self, x: int) -> int:
        """Number of edge ends at x (a self-loop counts twice)."""
        return int(self.indptr[x + 1] - self.indptr[x])

    def incident_edges(self, x: int) -> np.ndarray:
        return self.inc_edge[self.indptr[x]:self.indptr[x + 1]]

    def incident_others(self, x: int) -> np.ndarray:
        return self.inc_other[self.indptr[x]:self.indptr[x + 1]]

    def neighbors(self, x: int) -> list[int]:
        """Distinct adjacent vertices, in first-occurrence order."""
        seen, out = set(), []
        for y in self.incident_others(x):
            y = int(y)
            if y != x and y not in seen:
                seen.add(y)
                out.append(y)
        return out

    def edge_endpoints(self, eid: int) -> tuple[int, int]:
        return int(self.edge_u[eid]), int(self.edge_v[eid])

    def other_end(self, eid: int, x: int) -> int:
        u, v = int(self.edge_u[eid]), int(self.edge_v[eid])
        return v if u == x else u

    def multiplicities(self):
        """({(u,v): count} with u < v, {v: loop count})."""
        pairs, loops = {}, {}
        for u, v in zip(self.edge_u.tolist(), self.edge_v.tolist()):
            if u == v:
                loops[u] = loops.get(u, 0) + 1
            else:
                key = (min(u, v), max(u, v))
                pairs[key] = pairs.get(key, 0) + 1
        return pairs, loops

    def is_connected(self) -> bool:
        seen = np.zeros(self.nv, dtype=bool)
        stack = [self.sink]
        seen[self.sink] = True
        while stack:
            x = stack.pop()
            for y in self.incident_others(x):
                if not seen[y]:
                    seen[y] = True
                    stack.append(int(y))
        return bool(seen.all())

    def edge_list(self) -> list[tuple[int, int]]:
        return list(zip(self.edge_u.tolist(), self.edge_v.tolist()))

    # -- lattice metadata --------------------------------------------------

    def origin_index(self) -> int:
        if self.region is None:
            raise ValueError("not a lattice-collapse graph")
        return self.region.index((0,) * self.region.d)

    def lattice_neighbor_indices(self, x: int) -> list[int]:
        """Graph indices of x's in-region lattice neighbors."""
        if self.region is None:
            raise ValueError("not a lattice-collapse graph")
        site = self.region.sites[x]
        out = []
        for step in directions(self.region.d):
            nbr = tuple(a + b for a, b in zip(site, step))
            if nbr in self.region:
                out.append(self.region.index(nbr))
        return out


def canonical_edge_order(graph: SinkedMultigraph, x: int) -> list[int]:
    """The fixed total order of x's incident edges.  The sink is rejected."""
    if x == graph.sink:
        raise ValueError("the sink has no canonical edge order")
    return [int(e) for e in graph.incident_edges(x)]


def from_edges(edges, sink, nv=None) -> SinkedMultigraph:
    """Build a general multigraph from an (u, v) edge list."""
    edges = [(int(u), int(v)) for u, v in edges]
    top = max(max(u, v) for u, v in edges)
    if nv is None:
        nv = max(top + 1, sink + 1)
    return SinkedMultigraph(nv, sink, edges)


def collapse_boundary(region: Region) -> SinkedMultigraph:
    """Collapse the complement of a lattice region to a single sink vertex.

    One graph vertex per region site, in the region's site order, plus the
    sink at index ``len(region)``.  Each lattice edge leaving the region
    becomes its own parallel edge to the sink; self-loops at the sink are
    never created.  Every non-sink vertex ends up with degree exactly 2d.
    """
    if region.label[0] == "cube":
        return _collapse_cube(region)
    return _collapse_generic(region)


def _collapse_generic(region: Region) -> SinkedMultigraph:
    d = region.d
    steps = directions(d)
    n = len(region)
    sink = n
    edges = []
    created = {}
    incident = [[0] * (2 * d) for _ in range(n)]
    sink_row = []
    for i, site in enumerate(region.sites):
        for slot, step in enumerate(steps):
            nbr = tuple(a + b for a, b in zip(site, step))
            if nbr in region:
                j = region.index(nbr)
                if slot % 2 == 0:     # +e_k always raises the lexicographic index
                    eid = len(edges)
                    edges.append((i, j))
                    created[(i, slot)] = eid
                else:
                    eid = created[(j, slot - 1)]
            else:
                eid = len(edges)
                edges.append((i, sink))
                sink_row.append(eid)
            incident[i][slot] = eid
    incident.append(sink_row)
    return SinkedMultigraph(n + 1, sink, edges, incident=incident, region=region)


def _collapse_cube(region: Region) -> SinkedMultigraph:
    """Vectorized collapse for cube regions; same graph as the generic path."""
    d = region.d
    r = region.label[1]
    L = 2 * r + 1
    n = L**d
    sink = n
    two_d = 2 * d
    idx = np.arange(n, dtype=np.int64)
    strides = np.array([L ** (d - 1 - i) for i in range(d)], dtype=np.int64)

    other = np.empty((n, two_d), dtype=np.int64)
    inside = np.empty((n, two_d), dtype=bool)
    for i in range(d):
        c = (idx // strides[i]) % L
        inside[:, 2 * i] = c < L - 1
        inside[:, 2 * i + 1] = c > 0
        other[:, 2 * i] = idx + strides[i]
        other[:, 2 * i + 1] = idx - strides[i]
    other[~inside] = sink

    plus = np.zeros((n, two_d), dtype=bool)
    plus[:, 0::2] = True
    new = (plus & inside) | ~inside
    flat_new = new.ravel()
    ids = np.cumsum(flat_new, dtype=np.int64).reshape(n, two_d) - 1

    inc = np.empty((n, two_d), dtype=np.int64)
    inc[new] = ids[new]
    # a -e_i slot that stays inside reuses the edge created at the neighbor's +e_i slot
    for i in range(d):
        sl = 2 * i + 1
        mask = inside[:, sl]
        inc[mask, sl] = ids[idx[mask] - strides[i], 2 * i]

    m = int(flat_new.sum())
    edge_u = np.repeat(idx, two_d)[flat_new]
    edge_v = other.ravel()[flat_new]
    sink_row = inc.ravel()[(~inside).ravel()]
    # the scan above visits (vertex, slot) in creation order, so sink_row is id-sorted
    g = SinkedMultigraph.__new__(SinkedMultigraph)
    g.nv = n + 1
    g.sink = sink
    g.edge_u = edge_u
    g.edge_v = edge_v
    g.region = region
    counts = np.full(n + 1, two_d, dtype=np.int64)
    counts[sink] = len(sink_row)
    g.indptr = np.zeros(n + 2, dtype=np.int64)
    np.cumsum(counts, out=g.indptr[1:])
    g.inc_edge = np.concatenate([inc.ravel(), sink_row])
    others_rows = other.ravel()
    sink_others = np.repeat(idx, two_d)[(~inside).ravel()]
    g.inc_other = np.concatenate([others_rows, sink_others])
    assert g.inc_edge.shape[0] == 2 * m
    return g


# -- edge-list text format -------------------------------------------------

def to_edge_list_text(graph: SinkedMultigraph) -> str:
    """One line per edge 'u v', plus a 'sink <id>' line; parallels repeat."""
    lines = [f"sink {graph.sink}"]
    lines.extend(f"{u} {v}" for u, v in graph.edge_list())
    return "\n".join(lines) + "\n"


def from_edge_list_text(text: str) -> SinkedMultigraph:
    sink = None
    edges = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if ln.startswith("sink"):
            sink = int(ln.split()[1])
            continue
        u, v = ln.split()
        edges.append((int(u), int(v)))
    if sink is None:
        raise ValueError("edge-list file must contain a 'sink <id>' line")
    if not edges:
        raise ValueError("edge-list file contains no edges")
    return from_edges(edges, sink)
