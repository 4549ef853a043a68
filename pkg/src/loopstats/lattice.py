"""Finite regions of the hypercubic lattice Z^d.

Sites are integer tuples.  Directions are ordered (+e1, -e1, +e2, -e2, ...)
throughout the package; this fixed order is what makes the per-vertex edge
orderings of the collapsed multigraphs canonical and runs reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


def directions(d: int) -> tuple[tuple[int, ...], ...]:
    """The 2d unit steps in canonical order (+e1, -e1, +e2, -e2, ...)."""
    out = []
    for i in range(d):
        for sgn in (1, -1):
            step = [0] * d
            step[i] = sgn
            out.append(tuple(step))
    return tuple(out)


@dataclass(frozen=True)
class Lattice:
    """The lattice Z^d; holds the dimension and neighbor geometry."""

    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("dimension must be at least 2")

    @property
    def degree(self) -> int:
        return 2 * self.d

    def neighbors(self, site: tuple[int, ...]) -> list[tuple[int, ...]]:
        return [tuple(a + b for a, b in zip(site, step)) for step in directions(self.d)]


@dataclass(frozen=True)
class Region:
    """A finite nonempty set of sites of Z^d.

    ``sites`` is sorted lexicographically; the position of a site in this
    order is its vertex index in the collapsed multigraph.  ``label``
    records how the region was built ('cube', radius) or ('explicit',).
    """

    d: int
    sites: tuple[tuple[int, ...], ...]
    label: tuple = ("explicit",)
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("dimension must be at least 2")
        if not self.sites:
            raise ValueError("region must be nonempty")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.sites)})

    @staticmethod
    def from_sites(d: int, sites) -> "Region":
        sites = tuple(sorted({tuple(map(int, s)) for s in sites}))
        for s in sites:
            if len(s) != d:
                raise ValueError(f"site {s} does not have dimension {d}")
        return Region(d=d, sites=sites)

    def __len__(self) -> int:
        return len(self.sites)

    def __contains__(self, site) -> bool:
        return tuple(site) in self._index

    def index(self, site) -> int:
        return self._index[tuple(site)]

    def boundary(self) -> tuple[tuple[int, ...], ...]:
        """Sites outside the region adjacent to it (disjoint from the region)."""
        steps = directions(self.d)
        out = set()
        for s in self.sites:
            for step in steps:
                t = tuple(a + b for a, b in zip(s, step))
                if t not in self._index:
                    out.add(t)
        return tuple(sorted(out))


def build_cube_region(d: int, r: int) -> Region:
    """The cube [-r, r]^d intersected with Z^d; (2r+1)^d sites."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    rng = range(-r, r + 1)
    sites = tuple(itertools.product(rng, repeat=d))
    return Region(d=d, sites=sites, label=("cube", r))


def write_region(region: Region) -> str:
    """Region file format: 'dim <d>' then one site per line."""
    lines = [f"dim {region.d}"]
    lines.extend(" ".join(map(str, s)) for s in region.sites)
    return "\n".join(lines) + "\n"


def read_region(text: str) -> Region:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("dim "):
        raise ValueError("region file must start with 'dim <d>'")
    d = int(lines[0].split()[1])
    sites = [tuple(int(x) for x in ln.split()) for ln in lines[1:]]
    return Region.from_sites(d, sites)
