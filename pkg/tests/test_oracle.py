from __future__ import annotations

import time

import pytest

from ramsey_books.oracle import book_ramsey_number, count_avoiding, ramsey_number
from ramsey_books.search import find_clique


def star_ramsey(m: int) -> int:
    """Known closed form for two equal stars K_{1,m}: 2m - 1 if m is even, else 2m."""
    return 2 * m - 1 if m % 2 == 0 else 2 * m


def test_r33_is_six_and_fast():
    start = time.perf_counter()
    res = ramsey_number(3, 3)
    assert time.perf_counter() - start < 5
    assert res.value == 6
    ext = res.extremal
    assert ext.n == 5
    assert find_clique(ext, "red", 3) is None and find_clique(ext, "blue", 3) is None


def test_r33_by_plain_enumeration():
    # 12 labelled pentagon colorings of K_5, none of K_6
    assert count_avoiding(5, 3, 3) == 12
    assert count_avoiding(6, 3, 3) == 0


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_r2k(k):
    assert ramsey_number(2, k).value == k
    assert ramsey_number(k, 2).value == k


def test_r34_small_side_counts():
    # a coloring of K_4 fails to avoid (red K_3, blue K_4) iff it has a red triangle or is all blue
    assert count_avoiding(4, 3, 4) == 2 ** 6 - count_with_red_triangle_k4() - 1


def count_with_red_triangle_k4() -> int:
    import itertools

    from ramsey_books.coloring import EdgeColoring

    return sum(
        find_clique(EdgeColoring.from_pair_bits(4, bits), "red", 3) is not None
        for bits in itertools.product((False, True), repeat=6)
    )


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_star_book_numbers_match_closed_form(m):
    assert book_ramsey_number(1, m).value == star_ramsey(m)


def test_book_b21_is_triangle():
    assert book_ramsey_number(2, 1).value == 6
