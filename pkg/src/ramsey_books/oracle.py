"""Exact small Ramsey numbers by exhaustive search.

Colorings of K_N are built one vertex at a time: vertex ``j`` chooses its red
neighbourhood among the ``2^j`` subsets of earlier vertices.  Every coloring
of K_N restricts to a coloring of K_{N-1}, so pruning a branch as soon as a
monochromatic target through the new vertex appears still visits every
target-free coloring.  No isomorphism rejection is attempted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from .coloring import DomainError, EdgeColoring
from .search import book_in, clique_in

# a predicate receives (red, blue, j) for the partial coloring on 0..j and
# returns True if a forbidden structure through vertex j exists
Forbidden = Callable[[list, list, int], bool]


@dataclass
class OracleResult:
    value: int
    extremal: Optional[EdgeColoring]  # a target-free coloring on value-1 vertices
    nodes: int = 0
    counts: dict = field(default_factory=dict)  # N -> number of target-free colorings of K_N


def _avoiding_exists(n: int, forbidden: Forbidden, counter: list) -> Optional[list]:
    red = [0] * n
    blue = [0] * n

    def place(j: int) -> bool:
        if j == n:
            return True
        prior = (1 << j) - 1
        for s in range(1 << j):
            counter[0] += 1
            red[j], blue[j] = s, prior & ~s
            for i in range(j):
                bit = 1 << j
                if (s >> i) & 1:
                    red[i] |= bit
                else:
                    blue[i] |= bit
            ok = not forbidden(red, blue, j)
            if ok and place(j + 1):
                return True
            for i in range(j):
                red[i] &= ~(1 << j)
                blue[i] &= ~(1 << j)
        red[j] = blue[j] = 0
        return False

    return list(red) if place(0) else None


def _search(forbidden: Forbidden, limit: int) -> OracleResult:
    counter = [0]
    last: Optional[list] = None
    last_n = 0
    for n in range(1, limit + 1):
        found = _avoiding_exists(n, forbidden, counter)
        if found is None:
            extremal = EdgeColoring(last_n, tuple(last)) if last else None
            return OracleResult(n, extremal, counter[0])
        last, last_n = found, n
    raise DomainError(f"search limit {limit} reached without an answer")


def ramsey_number(k: int, ell: int, limit: int = 20) -> OracleResult:
    """r(k, ell): least N with a red K_k or blue K_ell in every coloring of K_N."""
    if k < 1 or ell < 1:
        raise DomainError("k and ell must be positive")

    def forbidden(red, blue, j):
        # a new red K_k must contain j: a red K_{k-1} inside N_R(j), same for blue
        if k == 1 or ell == 1:
            return True
        return clique_in(red, red[j], k - 1) is not None or clique_in(blue, blue[j], ell - 1) is not None

    return _search(forbidden, limit)


def book_ramsey_number(t: int, m: int, limit: int = 40) -> OracleResult:
    """r(B_{t,m}): least N such that every coloring of K_N has a monochromatic B_{t,m}."""
    if t < 1 or m < 1:
        raise DomainError("t and m must be positive")

    def forbidden(red, blue, j):
        # a new book uses j as a spine vertex or as a page; either way its
        # spine lies inside N_c(j) + {j}
        for adj in (red, blue):
            upto = (1 << (j + 1)) - 1
            if book_in(adj, adj[j] | (1 << j), t, m, upto) is not None:
                return True
        return False

    return _search(forbidden, limit)


def count_avoiding(n: int, k: int, ell: int) -> int:
    """Number of labelled colorings of K_n with no red K_k and no blue K_ell (brute force).

    Colorings are enumerated as integers over the C(n,2) pairs (bit set = red);
    each k- or ell-subset becomes a mask of its pairs.
    """
    if n < 1:
        return 1
    if k <= 1 or ell <= 1:
        return 0
    index = {p: i for i, p in enumerate(itertools.combinations(range(n), 2))}

    def masks(size: int) -> list[int]:
        return [
            sum(1 << index[p] for p in itertools.combinations(sub, 2))
            for sub in itertools.combinations(range(n), size)
        ]

    red_masks, blue_masks = masks(k), masks(ell)
    total = 0
    for code in range(1 << len(index)):
        if any(code & m == m for m in red_masks):
            continue
        if any(code & m == 0 for m in blue_masks):
            continue
        total += 1
    return total
