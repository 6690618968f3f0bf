"""Exhaustive witness search: monochromatic cliques and books.

Both searches enumerate candidates in lexicographic order over sorted vertex
tuples, so the first witness found is the lexicographically least one.  The
recursive helpers work directly on lists of adjacency bit masks; that lets the
Ramsey oracles reuse them on partially built colorings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .coloring import Color, DomainError, EdgeColoring, SetLike, lowest, members, vset


@dataclass(frozen=True)
class CliqueWitness:
    color: Color
    vertices: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.vertices)

    def validate(self, coloring: EdgeColoring) -> bool:
        adj = coloring.adjacency(self.color)
        vs = self.vertices
        if len(set(vs)) != len(vs) or any(v < 0 or v >= coloring.n for v in vs):
            return False
        return all((adj[u] >> w) & 1 for i, u in enumerate(vs) for w in vs[i + 1:])

    def to_dict(self) -> dict:
        return {"type": "clique", "color": self.color.value, "vertices": list(self.vertices)}


@dataclass(frozen=True)
class BookWitness:
    color: Color
    spine: tuple[int, ...]
    pages: tuple[int, ...]

    @property
    def t(self) -> int:
        return len(self.spine)

    @property
    def m(self) -> int:
        return len(self.pages)

    @property
    def disjoint(self) -> bool:
        return not set(self.spine) & set(self.pages)

    def validate(self, coloring: EdgeColoring) -> bool:
        adj = coloring.adjacency(self.color)
        everything = self.spine + self.pages
        if len(set(everything)) != len(everything):
            return False
        if any(v < 0 or v >= coloring.n for v in everything):
            return False
        page_mask = sum(1 << p for p in self.pages)
        for i, s in enumerate(self.spine):
            if adj[s] & page_mask != page_mask:
                return False
            if any(not (adj[s] >> w) & 1 for w in self.spine[i + 1:]):
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "type": "book",
            "color": self.color.value,
            "spine": list(self.spine),
            "pages": list(self.pages),
        }


def witness_from_dict(data: dict) -> "CliqueWitness | BookWitness":
    color = Color.parse(data["color"])
    if data.get("type") == "clique":
        return CliqueWitness(color, tuple(sorted(data["vertices"])))
    if data.get("type") == "book":
        return BookWitness(color, tuple(sorted(data["spine"])), tuple(sorted(data["pages"])))
    raise DomainError(f"unknown witness type {data.get('type')!r}")


# bit-mask level helpers ---------------------------------------------------


def clique_in(adj: Sequence[int], candidates: int, k: int) -> Optional[list[int]]:
    """Lexicographically least k-clique of ``adj`` inside ``candidates``."""
    if k <= 0:
        return []
    if candidates.bit_count() < k:
        return None
    chosen: list[int] = []

    def extend(cand: int, need: int) -> bool:
        if need == 0:
            return True
        while cand:
            if cand.bit_count() < need:
                return False
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            # later members of the clique are taken from vertices above v
            chosen.append(v)
            if extend(cand & adj[v], need - 1):
                return True
            chosen.pop()
        return False

    return chosen if extend(candidates, k) else None


def cliques_in(adj: Sequence[int], candidates: int, k: int, floor: int = 0) -> Iterator[tuple[list[int], int]]:
    """Yield ``(clique, common)`` for every k-clique in lexicographic order.

    ``common`` is the common neighbourhood of the clique (intersected with
    nothing else).  Cliques whose common neighbourhood has fewer than
    ``floor`` vertices outside the remaining candidate budget are pruned.
    """
    chosen: list[int] = []

    def walk(cand: int, common: int, need: int):
        if need == 0:
            yield list(chosen), common
            return
        while cand:
            if cand.bit_count() < need:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            new_common = common & adj[v]
            # the remaining spine vertices and the pages all live in new_common
            if new_common.bit_count() < floor + need - 1:
                continue
            chosen.append(v)
            yield from walk(cand & adj[v], new_common, need - 1)
            chosen.pop()

    full = -1  # every bit set: the empty spine has everyone as a common neighbour
    yield from walk(candidates, full, k)


def book_in(
    adj: Sequence[int], spine_candidates: int, t: int, m: int, universe: int
) -> Optional[tuple[list[int], int]]:
    """Least spine (a t-clique inside ``spine_candidates``) with >= m pages in ``universe``."""
    for spine, common in cliques_in(adj, spine_candidates, t, floor=m):
        pages = common & universe
        if pages.bit_count() >= m:
            return spine, lowest(pages, m)
    return None


# public API ---------------------------------------------------------------


def find_clique(
    coloring: EdgeColoring, color: "Color | str", k: int, within: "SetLike | None" = None
) -> Optional[CliqueWitness]:
    """Lexicographically least monochromatic K_k in ``color`` (optionally inside ``within``)."""
    if k < 1:
        raise DomainError("k must be at least 1")
    color = Color.parse(color)
    cand = coloring.full if within is None else vset(within) & coloring.full
    found = clique_in(coloring.adjacency(color), cand, k)
    return None if found is None else CliqueWitness(color, tuple(found))


def find_book(coloring: EdgeColoring, color: "Color | str", t: int, m: int) -> Optional[BookWitness]:
    """Lexicographically least monochromatic B_{t,m}: least spine, lowest m pages."""
    if t < 1 or m < 0:
        raise DomainError("need t >= 1 and m >= 0")
    color = Color.parse(color)
    found = book_in(coloring.adjacency(color), coloring.full, t, m, coloring.full)
    if found is None:
        return None
    spine, pages = found
    return BookWitness(color, tuple(spine), tuple(members(pages)))


def book_to_clique(
    coloring: EdgeColoring, witness: BookWitness, k: int, ell: int
) -> Optional[CliqueWitness]:
    """Turn a monochromatic book into a clique.

    For a book in color c with spine size t, look inside the pages for a K_ell
    in the other color, or else a c-colored K_{k-t}, which together with the
    spine forms a c-colored K_k.
    """
    if not witness.validate(coloring):
        raise DomainError("book witness does not validate against the coloring")
    if witness.m < 1:
        raise DomainError("book must have at least one page")
    pages = sum(1 << p for p in witness.pages)
    other = find_clique(coloring, witness.color.other, ell, within=pages)
    if other is not None:
        return other
    need = k - witness.t
    if need <= 0:
        return CliqueWitness(witness.color, witness.spine[:k])
    same = find_clique(coloring, witness.color, need, within=pages)
    if same is None:
        return None
    return CliqueWitness(witness.color, tuple(sorted(witness.spine + same.vertices)))


def naive_has_clique(coloring: EdgeColoring, color: "Color | str", k: int) -> Optional[tuple[int, ...]]:
    """All-subsets enumeration used as an oracle in tests (n <= ~12)."""
    from itertools import combinations

    adj = coloring.adjacency(color)
    for combo in combinations(range(coloring.n), k):
        if all((adj[u] >> w) & 1 for i, u in enumerate(combo) for w in combo[i + 1:]):
            return combo
    return None
