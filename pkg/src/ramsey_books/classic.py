"""Erdős–Szekeres exploration and the inductive book construction.

Both ES variants keep three disjoint sets A, B, X with (A, X) a red book and
(B, X) a blue book.  At each step the least vertex v of X is examined: if it
has enough red neighbours inside X it joins A, otherwise it joins B, and X is
cut down to the corresponding neighbourhood of v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .coloring import Color, DomainError, EdgeColoring, lowest, members
from .search import BookWitness, CliqueWitness


@dataclass(frozen=True)
class EsStep:
    kind: str  # "red" or "blue"
    vertex: int
    x_before: int
    x_after: int
    red_neighbors: int
    threshold: int

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "vertex": self.vertex,
            "x_before": self.x_before,
            "x_after": self.x_after,
            "red_neighbors": self.red_neighbors,
            "threshold": self.threshold,
        }


@dataclass
class EsState:
    A: list[int] = field(default_factory=list)
    B: list[int] = field(default_factory=list)
    X: int = 0
    steps: list[EsStep] = field(default_factory=list)


@dataclass
class EsResult:
    outcome: str  # red_clique | blue_clique | exhausted
    witness: Optional[CliqueWitness]
    state: EsState
    n: int
    k: int
    ell: int
    gamma: Fraction


def check_es_books(coloring: EdgeColoring, A, B, X: int) -> bool:
    """(A, X) red book and (B, X) blue book, all three disjoint."""
    a_mask = sum(1 << v for v in A)
    b_mask = sum(1 << v for v in B)
    if a_mask & b_mask or a_mask & X or b_mask & X:
        return False
    for v in A:
        need = (a_mask & ~(1 << v)) | X
        if coloring.red[v] & need != need:
            return False
    for v in B:
        need = (b_mask & ~(1 << v)) | X
        if coloring.blue[v] & need != need:
            return False
    return True


def _run(coloring: EdgeColoring, k: int, ell: int, gamma: Fraction) -> EsResult:
    state = EsState(X=coloring.full)
    red = coloring.red
    blue = coloring.blue
    while True:
        size = state.X.bit_count()
        if len(state.A) >= k:
            witness = CliqueWitness(Color.RED, tuple(sorted(state.A)))
            return EsResult("red_clique", witness, state, coloring.n, k, ell, gamma)
        if len(state.B) >= ell:
            witness = CliqueWitness(Color.BLUE, tuple(sorted(state.B)))
            return EsResult("blue_clique", witness, state, coloring.n, k, ell, gamma)
        if size <= 1:
            return EsResult("exhausted", None, state, coloring.n, k, ell, gamma)
        low = state.X & -state.X
        v = low.bit_length() - 1
        rest = state.X ^ low
        reds = (red[v] & rest).bit_count()
        threshold = math.ceil((1 - gamma) * (size - 1))
        if reds >= threshold:
            state.A.append(v)
            new_x = red[v] & rest
            kind = "red"
        else:
            state.B.append(v)
            new_x = blue[v] & rest
            kind = "blue"
        state.steps.append(EsStep(kind, v, size, new_x.bit_count(), reds, threshold))
        state.X = new_x


def run_es(coloring: EdgeColoring, k: int) -> EsResult:
    """Diagonal Erdős–Szekeres algorithm (red step iff >= ceil((|X|-1)/2) red neighbours)."""
    if k < 2:
        raise DomainError("k must be at least 2")
    return _run(coloring, k, k, Fraction(1, 2))


def run_es_offdiag(coloring: EdgeColoring, k: int, ell: int) -> EsResult:
    """Off-diagonal variant with gamma = ell/(k+ell); stops at |A| >= k or |B| >= ell."""
    if not 2 <= ell <= k:
        raise DomainError("need 2 <= ell <= k")
    return _run(coloring, k, ell, Fraction(ell, k + ell))


def es_bound_violations(result: EsResult) -> list[str]:
    """Check the exact size recurrences on a trace; returns human-readable failures.

    Per step: a red step keeps >= ceil((1-gamma)(|X|-1)) vertices, a blue
    step >= ceil(gamma(|X|-1)).  Cumulatively: |X_j| >= (1-gamma)^a gamma^b N
    - (a+b) after a red and b blue steps, and for gamma = 1/2 the sharper
    2^j (|X_j| + 1) >= N + 1.
    """
    gamma = result.gamma
    n = result.n
    problems = []
    a = b = 0
    for j, step in enumerate(result.state.steps, start=1):
        base = step.x_before - 1
        if step.kind == "red":
            a += 1
            need = math.ceil((1 - gamma) * base)
        else:
            b += 1
            need = math.ceil(gamma * base)
        if step.x_after < need:
            problems.append(f"step {j}: |X| {step.x_after} < per-step bound {need}")
        product = (1 - gamma) ** a * gamma ** b * n - (a + b)
        if step.x_after < product:
            problems.append(f"step {j}: |X| {step.x_after} < product bound {float(product):.3f}")
        if gamma == Fraction(1, 2) and 2 ** j * (step.x_after + 1) < n + 1:
            problems.append(f"step {j}: 2^j(|X|+1) < N+1")
    return problems


def es_books_hold(coloring: EdgeColoring, result: EsResult) -> bool:
    """Replay a trace and check the red/blue book property after every step."""
    A: list[int] = []
    B: list[int] = []
    X = coloring.full
    if not check_es_books(coloring, A, B, X):
        return False
    for step in result.state.steps:
        v = step.vertex
        X &= ~(1 << v)
        if step.kind == "red":
            A.append(v)
            X &= coloring.red[v]
        else:
            B.append(v)
            X &= coloring.blue[v]
        if X.bit_count() != step.x_after or not check_es_books(coloring, A, B, X):
            return False
    return True


# inductive book construction ----------------------------------------------


def ramsey_book_induction(
    coloring: EdgeColoring, t: int, m: int, log: Optional[list] = None
) -> BookWitness:
    """Monochromatic B_{t,m} in any coloring of K_N with N >= (t+1)! m.

    Follows the inductive proof: find B_{t-1,(t+1)m}; either some page has m
    neighbours of the book's color among the pages (extend the spine), or a
    greedy chain of t vertices in the other color leaves >= m common pages.
    """
    if t < 1 or m < 1:
        raise DomainError("need t, m >= 1")
    if coloring.n < math.factorial(t + 1) * m:
        raise DomainError(f"need N >= (t+1)! m = {math.factorial(t + 1) * m}, got {coloring.n}")
    return _induct(coloring, t, m, log)


def _induct(coloring: EdgeColoring, t: int, m: int, log: Optional[list]) -> BookWitness:
    if t == 1:
        # pigeonhole on the N-1 >= 2m-1 edges at vertex 0
        reds = coloring.red[0]
        if reds.bit_count() >= m:
            w = BookWitness(Color.RED, (0,), tuple(members(lowest(reds, m))))
        else:
            w = BookWitness(Color.BLUE, (0,), tuple(members(lowest(coloring.blue[0], m))))
        if log is not None:
            log.append({"t": 1, "m": m, "case": "pigeonhole", "color": w.color.value})
        return w

    inner = _induct(coloring, t - 1, (t + 1) * m, log)
    color = inner.color
    same = coloring.adjacency(color)
    other = coloring.adjacency(color.other)
    X = sum(1 << p for p in inner.pages)
    for v in inner.pages:
        nb = same[v] & X
        if nb.bit_count() >= m:
            spine = tuple(sorted(inner.spine + (v,)))
            w = BookWitness(color, spine, tuple(members(lowest(nb, m))))
            if log is not None:
                log.append({"t": t, "m": m, "case": "extend", "color": color.value, "vertex": v})
            return w
    # every page has at most m-1 same-colored neighbours among the pages
    chain = []
    rest = X
    for _ in range(t):
        low = rest & -rest
        v = low.bit_length() - 1
        chain.append(v)
        rest = other[v] & (rest ^ low)
    w = BookWitness(color.other, tuple(chain), tuple(members(lowest(rest, m))))
    if log is not None:
        log.append({"t": t, "m": m, "case": "chain", "color": color.other.value, "chain": chain})
    return w
