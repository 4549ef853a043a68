"""Seeded counter-based random streams.

The generator is splitmix64: a 64-bit counter advanced by a fixed odd
increment (the golden gamma), with outputs produced by a bijective
finalizer.  Streams are split by hashing (seed, index) pairs, so every
Monte Carlo sample owns a private stream and results do not depend on how
work is chunked across workers.  The numba kernels in ``_kernels`` use the
same constants and mixing function; ``tests/test_rng.py`` pins the two
implementations against each other bit for bit.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """Bijective 64-bit finalizer (splitmix64 / murmur3-style avalanche)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_state(seed: int, index: int) -> int:
    """Initial counter state of sub-stream ``index`` of ``seed``.

    Used for per-sample streams: sample ``i`` of a run seeded with ``s``
    always consumes the same random values, no matter how samples are
    batched or parallelized.
    """
    return mix64(mix64((seed + GAMMA * index) & MASK64) + GAMMA)


class RandomStream:
    """Stateful view of one splitmix64 stream.

    Construct from a 64-bit seed; ``split(i)`` gives the i-th child stream,
    deterministically and without touching this stream's state.
    """

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int, _state: int | None = None):
        self.seed = seed & MASK64
        self._state = derive_state(self.seed, 0) if _state is None else _state

    def split(self, index: int) -> "RandomStream":
        """Child stream ``index``; disjoint from this stream and other children."""
        child_seed = mix64(self.seed ^ mix64(index + GAMMA))
        return RandomStream(child_seed)

    def u64(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        return mix64(self._state)

    def randint(self, k: int) -> int:
        """Uniform integer in [0, k), exactly unbiased (rejection)."""
        if k <= 0:
            raise ValueError("k must be positive")
        lim = (MASK64 // k) * k
        while True:
            u = self.u64()
            if u < lim:
                return u % k

    def random(self) -> float:
        """Uniform float64 in [0, 1) with 53 random bits."""
        return (self.u64() >> 11) * 2.0**-53

    def choice(self, seq):
        return seq[self.randint(len(seq))]


def as_stream(rng) -> RandomStream:
    """Accept either a RandomStream or a plain integer seed."""
    if isinstance(rng, RandomStream):
        return rng
    return RandomStream(int(rng))
