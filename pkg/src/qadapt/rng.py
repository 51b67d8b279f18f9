"""Counter-based pseudo-random streams with documented, fixed constants.

Every stochastic piece of this package (environment sampling, measurement
outcomes, exploration angles) draws from :class:`RngStream`, a SplitMix64
generator.  SplitMix64 is chosen over a platform-default RNG because the
whole algorithm fits in a dozen lines with two fixed 64-bit constants, so
ensembles are bit-reproducible across platforms, languages, and worker
counts.

Algorithm (Steele/Lea/Flood style): the stream state advances by the
64-bit golden-ratio increment and each output is the finalizer

    z  = state
    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

all modulo 2**64.  Draw ``k`` of a stream seeded with ``s`` is therefore a
pure function of ``(s, k)``, which is what makes batched generation
(:meth:`RngStream.uniforms`) identical to sequential scalar draws.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# float in [0, 1) from the top 53 bits of a 64-bit word
_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a fixed bijective scramble of a 64-bit word."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base: int, *indices: int) -> int:
    """Derive a child seed from ``base`` and a path of non-negative indices.

    Each index is folded in as ``h = mix64(h + GOLDEN_GAMMA * (index + 1))``,
    so distinct paths from one base give independent-looking seeds and the
    mapping is reproducible everywhere.  Used for per-trial seeds and for
    separating the environment-sampling stream from the protocol stream
    within a trial.
    """
    h = base & _MASK64
    for idx in indices:
        if idx < 0:
            raise ValueError(f"derive_seed indices must be >= 0, got {idx}")
        h = mix64((h + GOLDEN_GAMMA * (idx + 1)) & _MASK64)
    return h


class RngStream:
    """Deterministic uniform stream; identical seed, identical draws.

    A stream is single-owner: callers that need parallel randomness must
    derive independent children via :meth:`split` or :func:`derive_seed`
    instead of sharing one instance.
    """

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._state = self.seed

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed:#018x})"

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & _MASK64
        return mix64(self._state)

    def uniform(self) -> float:
        """One float uniform on [0, 1)."""
        return (self.next_u64() >> 11) * _INV_2_53

    def uniform_symmetric(self) -> float:
        """One float uniform on [-1/2, 1/2), for exploration angles."""
        return self.uniform() - 0.5

    def uniforms(self, n: int) -> np.ndarray:
        """Vector of ``n`` uniforms, bit-identical to ``n`` scalar draws."""
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self._state) + steps * np.uint64(GOLDEN_GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
            z = z ^ (z >> np.uint64(31))
        self._state = (self._state + GOLDEN_GAMMA * n) & _MASK64
        return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def split(self) -> "RngStream":
        """Child stream seeded from the next output word; advances self once."""
        return RngStream(self.next_u64())
