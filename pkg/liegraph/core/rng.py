"""Seeded xorshift64* generator used for every randomized step."""

from fractions import Fraction
from typing import List, MutableSequence


MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step; spreads small seeds over the full 64-bit state."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    """
    xorshift64* pseudo-random generator (shifts 12/25/27, multiplier
    0x2545F4914F6CDD1D), seeded through splitmix64.

    Identical seeds give identical streams on every platform.
    """

    MULTIPLIER = 0x2545F4914F6CDD1D

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._state = splitmix64(seed & MASK64) or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self._state = x
        return (x * self.MULTIPLIER) & MASK64

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, low: int, high: int) -> int:
        """Integer in [low, high], both inclusive."""
        if high < low:
            raise ValueError(f"Empty range [{low}, {high}]")
        return low + self.next_u64() % (high - low + 1)

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def shuffle(self, items: MutableSequence) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> List[int]:
        """Random permutation of 1..n as a 1-based image list."""
        perm = list(range(1, n + 1))
        self.shuffle(perm)
        return perm

    def rational(self, low: int = 1, high: int = 9) -> Fraction:
        """Positive rational p/q with p, q drawn from [low, high]."""
        return Fraction(self.randint(low, high), self.randint(low, high))
