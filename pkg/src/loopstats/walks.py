"""Simple random walks and chronological loop erasure.

The loop erasure of a walk deletes cycles in the order they are completed:
starting from the first vertex, repeatedly jump past the last return visit
to the current vertex.  The single-pass implementation below erases each
cycle the moment the walk revisits a vertex on the current stack, which
yields the same path in O(length) time; the literal jump-past-last-visit
recursion lives in the test suite as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .estimates import Estimate
from .graph import collapse_boundary
from .lattice import Region, build_cube_region, directions
from .rng import as_stream


@dataclass(frozen=True)
class Walk:
    """A nearest-neighbor walk: consecutive sites differ by one unit step."""

    sites: tuple

    def __post_init__(self):
        if not self.sites:
            raise ValueError("a walk has at least one site")
        for a, b in zip(self.sites, self.sites[1:]):
            if sum(abs(x - y) for x, y in zip(a, b)) != 1:
                raise ValueError(f"{a} -> {b} is not a lattice step")

    def __len__(self):
        return len(self.sites)


@dataclass(frozen=True)
class Path(Walk):
    """A walk visiting each site at most once."""

    def __post_init__(self):
        super().__post_init__()
        if len(set(self.sites)) != len(self.sites):
            raise ValueError("path sites must be distinct")


def loop_erase(walk) -> Path:
    """Chronological loop erasure; keeps the first and last site."""
    sites = walk.sites if isinstance(walk, Walk) else tuple(walk)
    if not sites:
        raise ValueError("cannot loop-erase an empty walk")
    stack = []
    pos = {}
    for s in sites:
        if s in pos:
            k = pos[s]
            for t in stack[k + 1:]:
                del pos[t]
            del stack[k + 1:]
        else:
            pos[s] = len(stack)
            stack.append(s)
    assert stack[0] == sites[0] and stack[-1] == sites[-1]
    return Path(sites=tuple(stack))


def sample_exit_walk(region: Region, start, rng) -> Walk:
    """Uniform-step walk from ``start`` until it first leaves the region.

    The exit site (the first site outside the region) is the final element.
    """
    start = tuple(start)
    if start not in region:
        raise ValueError("start site must lie in the region")
    stream = as_stream(rng)
    steps = directions(region.d)
    sites = [start]
    x = start
    while x in region:
        step = steps[stream.randint(len(steps))]
        x = tuple(a + b for a, b in zip(x, step))
        sites.append(x)
    return Walk(sites=tuple(sites))


def estimate_xi_lerw(d: int, r: int, samples: int, seed: int,
                     workers: int = 1, target_step=None) -> Estimate:
    """Direct estimator of the looping constant from exit walks.

    Runs loop-erased exit walks from the origin on the radius-r cube and
    scales the frequency of ``target_step`` (default +e1) lying on the
    erased path by 2d.  The walk lives on the boundary-collapsed graph, so
    hitting the sink is exactly first exit from the cube.
    """
    if r < 1:
        raise ValueError("radius must be at least 1")
    if samples <= 0:
        raise ValueError("need a positive sample count")
    g = collapse_boundary(build_cube_region(d, r))
    o = g.origin_index()
    if target_step is None:
        target_step = (1,) + (0,) * (d - 1)
    target = g.region.index(tuple(target_step))

    def run(start, count):
        return _kernels.lerw_hit_counts(
            g.indptr, g.inc_edge, g.inc_other, g.nv, g.sink,
            o, target, count, np.uint64(seed), np.uint64(start))

    hits = sum(_fan_out(run, samples, workers))
    return Estimate.from_sums(int(hits), int(hits), samples, seed, scale=2 * d)


def _fan_out(run, samples, workers):
    """Split [0, samples) into per-worker index ranges and run them.

    Sample i always consumes stream (seed, i), so the outputs are identical
    for every worker count; threads only buy wall time (the kernels drop
    the GIL).
    """
    workers = max(1, min(workers, samples))
    bounds = [samples * w // workers for w in range(workers + 1)]
    chunks = [(bounds[w], bounds[w + 1] - bounds[w]) for w in range(workers)]
    chunks = [(s, c) for s, c in chunks if c > 0]
    if len(chunks) == 1:
        return [run(*chunks[0])]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        return list(pool.map(lambda sc: run(*sc), chunks))
