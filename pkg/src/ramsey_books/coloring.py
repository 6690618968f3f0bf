"""Two-colorings of the edges of K_N stored as per-vertex bit-sets.

Vertex sets throughout the package are plain Python ints used as bit masks
(bit ``v`` set means vertex ``v`` is a member); ``int.bit_count`` gives sizes.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .rng import XorShiftRNG

MAX_VERTICES = int(os.environ.get("RAMSEY_MAX_VERTICES", "4096"))
BINARY_MAGIC = b"RBK1"

VertexSet = int
SetLike = Union[int, Iterable[int]]


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class Color(str, enum.Enum):
    RED = "red"
    BLUE = "blue"

    @property
    def other(self) -> "Color":
        return Color.BLUE if self is Color.RED else Color.RED

    @classmethod
    def parse(cls, value: "str | Color") -> "Color":
        if isinstance(value, Color):
            return value
        v = value.strip().lower()
        if v in ("r", "red"):
            return cls.RED
        if v in ("b", "blue"):
            return cls.BLUE
        raise DomainError(f"unknown color {value!r}")


def vset(items: SetLike) -> VertexSet:
    """Normalise an int mask or an iterable of vertices to a mask."""
    if isinstance(items, (int, np.integer)):
        return int(items)
    mask = 0
    for v in items:
        if int(v) < 0:
            raise DomainError(f"negative vertex {v}")
        mask |= 1 << int(v)
    return mask


def members(mask: VertexSet) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def size(mask: VertexSet) -> int:
    return mask.bit_count()


def lowest(mask: VertexSet, count: int) -> VertexSet:
    """The ``count`` smallest members of ``mask``."""
    out = 0
    for _ in range(count):
        if not mask:
            break
        low = mask & -mask
        out |= low
        mask ^= low
    return out


@dataclass(frozen=True)
class EdgeColoring:
    """Immutable red/blue coloring of E(K_n).

    ``red[v]`` is the bit mask of red neighbours of ``v``; every other pair is
    blue.
    """

    n: int
    red: tuple[int, ...]
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("a coloring needs at least one vertex")
        if self.n > MAX_VERTICES:
            raise DomainError(f"n={self.n} exceeds the configured maximum {MAX_VERTICES}")
        if len(self.red) != self.n:
            raise DomainError("red adjacency must have one mask per vertex")
        if self.validate:
            full = self.full
            for v, nb in enumerate(self.red):
                if nb & ~full or (nb >> v) & 1:
                    raise DomainError(f"red adjacency of {v} is not a subset of V minus v")
                rest = nb
                while rest:
                    low = rest & -rest
                    w = low.bit_length() - 1
                    if not (self.red[w] >> v) & 1:
                        raise DomainError(f"red adjacency not symmetric at ({v},{w})")
                    rest ^= low

    @property
    def full(self) -> VertexSet:
        return (1 << self.n) - 1

    @cached_property
    def blue(self) -> tuple[int, ...]:
        full = self.full
        return tuple(full & ~nb & ~(1 << v) for v, nb in enumerate(self.red))

    def adjacency(self, color: "Color | str") -> tuple[int, ...]:
        return self.red if Color.parse(color) is Color.RED else self.blue

    def neighbors(self, v: int, color: "Color | str") -> VertexSet:
        return self.adjacency(color)[v]

    def color(self, u: int, v: int) -> Color:
        if u == v:
            raise DomainError("no edge joins a vertex to itself")
        return Color.RED if (self.red[u] >> v) & 1 else Color.BLUE

    def swapped(self) -> "EdgeColoring":
        """The same coloring with the two colors exchanged."""
        return EdgeColoring(self.n, self.blue, validate=False)

    def edge_count(self, color: "Color | str", xs: SetLike, ys: SetLike) -> int:
        adj = self.adjacency(color)
        ys = vset(ys)
        total = 0
        for x in members(vset(xs)):
            total += (adj[x] & ys).bit_count()
        return total

    def pair_bits(self) -> list[bool]:
        """Red indicator for the pairs (0,1), (0,2), ..., (n-2,n-1)."""
        out = []
        for i in range(self.n):
            nb = self.red[i]
            out.extend(bool((nb >> j) & 1) for j in range(i + 1, self.n))
        return out

    def to_matrix(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=bool)
        for v, nb in enumerate(self.red):
            for w in members(nb):
                m[v, w] = True
        return m

    @classmethod
    def from_matrix(cls, red: np.ndarray, validate: bool = True) -> "EdgeColoring":
        red = np.asarray(red, dtype=bool)
        n = red.shape[0]
        packed = np.packbits(red, axis=1, bitorder="little")
        masks = tuple(int.from_bytes(row.tobytes(), "little") for row in packed)
        return cls(n, masks, validate=validate)

    @classmethod
    def from_pair_bits(cls, n: int, bits: Iterable[bool]) -> "EdgeColoring":
        bits = np.fromiter((bool(b) for b in bits), dtype=bool)
        if bits.size != n * (n - 1) // 2:
            raise DomainError(f"expected {n * (n - 1) // 2} pair colors, got {bits.size}")
        m = np.zeros((n, n), dtype=bool)
        m[np.triu_indices(n, 1)] = bits
        return cls.from_matrix(m | m.T, validate=False)

    # serialisation -------------------------------------------------------

    def to_text(self) -> str:
        body = "".join("R" if b else "B" for b in self.pair_bits())
        return f"{self.n}\n{body}\n"

    @classmethod
    def from_text(cls, text: str) -> "EdgeColoring":
        lines = text.split()
        if not lines:
            raise DomainError("empty coloring file")
        n = int(lines[0])
        body = lines[1] if len(lines) > 1 else ""
        if set(body) - {"R", "B"}:
            raise DomainError("pair colors must be R or B")
        return cls.from_pair_bits(n, (c == "R" for c in body))

    def to_bytes(self) -> bytes:
        bits = np.array(self.pair_bits(), dtype=bool)
        packed = np.packbits(bits, bitorder="little").tobytes()
        return BINARY_MAGIC + self.n.to_bytes(4, "little") + packed

    @classmethod
    def from_bytes(cls, data: bytes) -> "EdgeColoring":
        if data[:4] != BINARY_MAGIC:
            raise DomainError("missing RBK1 magic")
        n = int.from_bytes(data[4:8], "little")
        pairs = n * (n - 1) // 2
        raw = np.frombuffer(data[8:], dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        if bits.size < pairs:
            raise DomainError("truncated binary coloring")
        return cls.from_pair_bits(n, bits[:pairs])

    def save(self, path: "str | Path", binary: bool = False) -> None:
        path = Path(path)
        if binary:
            path.write_bytes(self.to_bytes())
        else:
            path.write_text(self.to_text())


def load(path: "str | Path") -> EdgeColoring:
    data = Path(path).read_bytes()
    if data[:4] == BINARY_MAGIC:
        return EdgeColoring.from_bytes(data)
    return EdgeColoring.from_text(data.decode("ascii"))


def density(coloring: EdgeColoring, color: "Color | str", xs: SetLike, ys: SetLike) -> Fraction:
    """Exact edge density e_color(X, Y) / (|X| |Y|) between disjoint sets."""
    xs, ys = vset(xs), vset(ys)
    if not xs or not ys:
        raise DomainError("density needs two non-empty sets")
    if xs & ys:
        raise DomainError("density needs disjoint sets")
    return Fraction(coloring.edge_count(color, xs, ys), xs.bit_count() * ys.bit_count())


# generators --------------------------------------------------------------


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    f = 2
    while f * f <= q:
        if q % f == 0:
            return False
        f += 1
    return True


def paley(prime: int) -> EdgeColoring:
    """Red iff the difference of the endpoints is a non-zero square mod ``prime``."""
    if not _is_prime(prime) or prime % 4 != 1:
        raise DomainError(f"Paley colorings need a prime = 1 mod 4, got {prime}")
    squares = {(i * i) % prime for i in range(1, prime)}
    red = tuple(
        sum(1 << j for j in range(prime) if j != i and (j - i) % prime in squares)
        for i in range(prime)
    )
    return EdgeColoring(prime, red)


def generate(
    n: int,
    kind: str = "random",
    *,
    p_red: float = 0.5,
    seed: int = 0,
    prime: "int | None" = None,
) -> EdgeColoring:
    """Build a coloring of K_n.

    ``kind`` is one of ``random`` (each pair red with probability ``p_red``,
    pairs drawn in lexicographic order from :class:`XorShiftRNG(seed)`),
    ``all_red``, ``all_blue`` or ``paley`` (requires ``n == prime``).
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    if kind == "all_red":
        full = (1 << n) - 1
        return EdgeColoring(n, tuple(full & ~(1 << v) for v in range(n)), validate=False)
    if kind == "all_blue":
        return EdgeColoring(n, (0,) * n, validate=False)
    if kind == "paley":
        q = n if prime is None else prime
        if q != n:
            raise DomainError("a Paley coloring has exactly `prime` vertices")
        return paley(q)
    if kind == "random":
        if not 0.0 <= p_red <= 1.0:
            raise DomainError("p_red must lie in [0, 1]")
        bits = XorShiftRNG(seed).bernoulli_bits(n * (n - 1) // 2, p_red)
        return EdgeColoring.from_pair_bits(n, bits)
    raise DomainError(f"unknown generator kind {kind!r}")
