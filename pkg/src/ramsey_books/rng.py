"""Deterministic random numbers shared by every generator in the package.

The stream is fixed by algorithm, not by whatever the host platform's
``random`` module happens to do:

* the integer seed is passed once through SplitMix64 to get the initial state
  (a zero state is replaced by the golden-ratio constant);
* each draw advances an xorshift64* generator (shifts 12, 25, 27 and the
  multiplier 0x2545F4914F6CDD1D) and returns the 64-bit product;
* ``random()`` keeps the top 53 bits, giving a double in [0, 1).
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class XorShiftRNG:
    """xorshift64* seeded through SplitMix64."""

    def __init__(self, seed: int):
        state = splitmix64(seed & MASK64)
        self.state = state or GOLDEN

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def randbelow(self, n: int) -> int:
        # rejection sampling keeps the draw exactly uniform
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def bernoulli_bits(self, count: int, p: float) -> list[bool]:
        """``count`` independent draws, True with probability ``p``."""
        # inlined loop: this is the hot path when generating large colorings
        x = self.state
        mult = 0x2545F4914F6CDD1D
        # compare on the 53-bit integer to avoid a float multiply per draw
        cut = p * 9007199254740992.0
        out = [False] * count
        for i in range(count):
            x ^= x >> 12
            x ^= (x << 25) & MASK64
            x ^= x >> 27
            out[i] = (((x * mult) & MASK64) >> 11) < cut
        self.state = x
        return out
