from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from ramsey_books.coloring import (
    BINARY_MAGIC,
    Color,
    DomainError,
    EdgeColoring,
    density,
    generate,
    load,
    members,
    paley,
    vset,
)


def test_all_red_densities():
    col = generate(5, "all_red")
    X, Y = {0, 1}, {2, 3, 4}
    assert density(col, "red", X, Y) == 1
    assert density(col, Color.BLUE, X, Y) == 0


def test_density_matches_hand_count():
    col = generate(10, "random", p_red=0.5, seed=1)
    X, Y = range(5), range(5, 10)
    reds = sum(col.color(x, y) is Color.RED for x in X for y in Y)
    assert density(col, "red", X, Y) == Fraction(reds, 25)
    assert density(col, "red", Y, X) == density(col, "red", X, Y)


def test_red_plus_blue_density_is_one(random_coloring):
    col = random_coloring(30, seed=4)
    for lo in range(1, 10):
        X, Y = range(lo), range(lo, 30)
        assert density(col, "red", X, Y) + density(col, "blue", X, Y) == 1


@pytest.mark.parametrize("X,Y", [(set(), {1}), ({1}, set()), ({0, 1}, {1, 2})])
def test_density_domain_errors(X, Y):
    with pytest.raises(DomainError):
        density(generate(4, "all_red"), "red", X, Y)


def test_generation_is_deterministic():
    assert generate(100, "random", p_red=0.5, seed=7) == generate(100, "random", p_red=0.5, seed=7)
    assert generate(100, "random", p_red=0.5, seed=7) != generate(100, "random", p_red=0.5, seed=8)


@pytest.mark.parametrize("kind", ["random", "all_red", "all_blue"])
def test_generator_output_is_symmetric_and_irreflexive(kind):
    col = generate(40, kind, p_red=0.3, seed=2)
    for v in range(col.n):
        assert not (col.red[v] >> v) & 1
        for w in members(col.red[v]):
            assert (col.red[w] >> v) & 1
        assert col.red[v] | col.blue[v] == col.full & ~(1 << v)
        assert not col.red[v] & col.blue[v]


def test_construction_rejects_bad_adjacency():
    with pytest.raises(DomainError):
        EdgeColoring(3, (0b010, 0b000, 0b000))  # not symmetric
    with pytest.raises(DomainError):
        EdgeColoring(2, (0b01, 0b00))  # self-loop


def test_paley_17_structure():
    col = paley(17)
    assert col.n == 17
    assert all(col.red[v].bit_count() == 8 for v in range(17))
    assert col == generate(17, "paley", prime=17)


@pytest.mark.parametrize("q", [7, 11, 15, 2])
def test_paley_rejects_non_qualifying(q):
    with pytest.raises(DomainError):
        paley(q)


def test_generate_errors():
    with pytest.raises(DomainError):
        generate(1, "all_red")
    with pytest.raises(DomainError):
        generate(5, "random", p_red=1.5)
    with pytest.raises(DomainError):
        generate(5, "nonsense")
    with pytest.raises(DomainError):
        generate(13, "paley", prime=17)


def test_text_format_pair_order():
    col = EdgeColoring(3, (0b100, 0b000, 0b001))  # only pair (0,2) red
    assert col.to_text() == "3\nBRB\n"
    assert EdgeColoring.from_text(col.to_text()) == col


def test_round_trips(tmp_path, random_coloring):
    col = random_coloring(37, seed=9)
    assert EdgeColoring.from_text(col.to_text()) == col
    data = col.to_bytes()
    assert data[:4] == BINARY_MAGIC
    assert int.from_bytes(data[4:8], "little") == 37
    assert EdgeColoring.from_bytes(data) == col
    assert EdgeColoring.from_matrix(col.to_matrix()) == col
    for binary in (False, True):
        path = tmp_path / f"c{binary}.col"
        col.save(path, binary=binary)
        assert load(path) == col


def test_matrix_view():
    col = generate(6, "random", seed=3)
    m = col.to_matrix()
    assert m.shape == (6, 6) and m.dtype == bool
    assert np.array_equal(m, m.T) and not m.diagonal().any()
    for u, v in itertools.combinations(range(6), 2):
        assert m[u, v] == (col.color(u, v) is Color.RED)


def test_swapped_exchanges_colors(random_coloring):
    col = random_coloring(20, seed=1)
    sw = col.swapped()
    assert sw.red == col.blue and sw.blue == col.red


def test_vertex_set_helpers():
    assert vset([0, 3]) == 0b1001
    assert members(0b1010) == [1, 3]
    with pytest.raises(DomainError):
        vset([-1])
