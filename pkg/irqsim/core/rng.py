"""
Seeded pseudo-random source and cost sampling.

The generator is splitmix64: a 64-bit counter advanced by the golden-ratio
increment and passed through a fixed mixing function. The output stream depends only on
the seed.
"""
import hashlib
import math

from irqsim.exceptions import BadDistribution
from irqsim.models.distributions import (
    ConstantDist,
    ShiftedExponentialDist,
    UniformDist,
)

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finaliser."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class Rng:
    """Deterministic 64-bit generator (splitmix64)."""

    __slots__ = ("seed", "state")

    def __init__(self, seed: int):
        if seed < 0 or seed > MASK64:
            raise ValueError(f"seed {seed} is not an unsigned 64-bit integer")
        self.seed = seed
        self.state = seed

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def next_float(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by unbiased rejection."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        if n == 1:
            return 0
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def fork(self, label: str) -> "Rng":
        """Derive an independent stream named ``label``.

        The child seed depends only on this generator's seed and the label,
        never on how many values have been drawn so far.
        """
        digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
        salt = int.from_bytes(digest, "big")
        return Rng(mix64((self.seed ^ salt) & MASK64))


def sample(rng: Rng, dist) -> int:
    """Draw one duration in nanoseconds from ``dist``.

    Args:
        rng: Generator to advance
        dist: A constant, uniform or shifted-exponential distribution

    Returns:
        int: Duration within the distribution's support

    Raises:
        BadDistribution: If the distribution is unknown or malformed
    """
    if isinstance(dist, ConstantDist):
        dist.check()
        return dist.value
    if isinstance(dist, UniformDist):
        dist.check()
        return dist.lo + rng.below(dist.hi - dist.lo + 1)
    if isinstance(dist, ShiftedExponentialDist):
        dist.check()
        tail = -(dist.mean - dist.min) * math.log1p(-rng.next_float())
        return dist.min + int(round(tail))
    raise BadDistribution(f"unsupported distribution {dist!r}")
