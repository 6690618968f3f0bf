from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from ramsey_books.coloring import generate, members
from ramsey_books.geometry import (
    cosh_sqrt2,
    f_eval,
    f_series,
    f_taylor,
    f_upper,
    geometric_witness,
    inner_product_identity_check,
    kappa_grid,
    mean_inner_identity,
    meets_geometric_bound,
    meets_one_color_bound,
    moment_estimate,
    one_color_witness,
    random_family,
    sigma_embedding,
)
from ramsey_books.rng import XorShiftRNG


def test_geometric_bound_is_exact():
    # count/total >= (1/8) 2^{-6 kappa}; at kappa = 1/2 the bound is 1/64
    assert meets_geometric_bound(1, 64, Fraction(1, 2))
    assert not meets_geometric_bound(1, 65, Fraction(1, 2))
    assert meets_one_color_bound(1, 9, Fraction(1))
    assert not meets_one_color_bound(1, 10, Fraction(1))


def test_kappa_grid():
    assert kappa_grid(Fraction(1, 4), Fraction(1)) == [Fraction(i, 4) for i in range(5)]


def test_inner_product_identity():
    col = generate(30, "all_red")
    X, Y = range(10), range(10, 30)
    assert inner_product_identity_check(col, X, Y, 0, 1) == (20, 20)
    col = generate(40, "random", seed=1)
    X, Y = set(range(20)), set(range(20, 40))
    pairs = list(itertools.product(range(20), repeat=2))
    for v, w in pairs[:1000]:
        dot, count = inner_product_identity_check(col, X, Y, v, w)
        assert dot == count


def test_inner_product_zero_for_empty_neighbourhood():
    col = generate(12, "all_blue")
    assert inner_product_identity_check(col, range(6), range(6, 12), 0, 1) == (0, 0)


def test_sigma_embedding_definition():
    col = generate(30, "random", seed=4)
    X, Y = set(range(10)), set(range(10, 30))
    emb = sigma_embedding(col, X, Y, "red", alpha=0.05)
    p = float(emb.p)
    for v in range(10):
        ind = np.array([(col.red[v] >> y) & 1 for y in range(10, 30)])
        assert np.allclose(emb.vector(v), (ind - p) / math.sqrt(0.05 * p * 20))
    assert emb.matrix().shape == (10, 20)


def test_geometric_witness_zero_vectors():
    z = np.zeros((5, 3))
    w = geometric_witness(z, z)
    # kappa = 0 already qualifies (probability 1); kappa = 1 qualifies too
    assert w.kappa == 0 and w.probability == 1.0
    assert meets_geometric_bound(w.count, w.total, Fraction(1))


def test_geometric_witness_single_vector():
    sy, sz = np.array([[1.5, 2.0]]), np.array([[0.3]])
    w = geometric_witness(sy, sz, dk=Fraction(1, 16))
    assert w.probability == 1.0
    assert float(w.kappa) ** 2 - 1 <= float(sy[0] @ sy[0])


def test_geometric_witness_guarantee_on_random_families():
    rng = XorShiftRNG(123)
    for _ in range(100):
        n = 1 + rng.randbelow(40)
        dy, dz = 1 + rng.randbelow(12), 1 + rng.randbelow(12)
        scale = [0.1, 1.0, 3.0, 10.0][rng.randbelow(4)]
        sy, sz = random_family(rng, n, dy, scale), random_family(rng, n, dz, scale)
        w = geometric_witness(sy, sz)
        assert meets_geometric_bound(w.count, w.total, w.kappa)
        GY, GZ = sy @ sy.T, sz @ sz.T
        thr = float(w.kappa) ** 2 - 1
        if w.orientation == "YZ":
            count = int(((GY >= thr) & (GZ >= -1)).sum())
        else:
            count = int(((GZ >= thr) & (GY >= -1)).sum())
        assert count == w.count


def test_one_color_zero_and_orthonormal():
    w = one_color_witness(np.zeros((4, 2)))
    assert w.probability == 1.0 and w.kappa == 0
    # nine orthonormal vectors: off-diagonal products are 0 >= kappa^2 - 1 at kappa = 1,
    # so the true probability at kappa = 1 is 1, not 1/9
    e = np.eye(9)
    w = one_color_witness(e)
    G = e @ e.T
    assert (G >= 0).mean() == 1.0
    assert meets_one_color_bound(81, 81, Fraction(1))
    assert w.kappa == 0


def test_one_color_random_families():
    rng = XorShiftRNG(9)
    for _ in range(100):
        sig = random_family(rng, 1 + rng.randbelow(30), 1 + rng.randbelow(10), 2.0)
        w = one_color_witness(sig)
        assert meets_one_color_bound(w.count, w.total, w.kappa)


def test_f_values():
    assert f_eval(0, 0) == 1
    assert f_eval(-1, 0) == pytest.approx(-2.0)
    assert cosh_sqrt2(-0.5) == pytest.approx(math.cos(1.0))


def test_f_taylor_coefficients():
    r = f_taylor(6)
    assert r[(0, 0)] == 1 and r[(1, 0)] == 3 and r[(0, 1)] == 3
    assert r[(1, 1)] == 2  # 2/2! from each of the two cosh factors
    assert all(c >= 0 for c in f_taylor(20).values())
    for y, z in [(0.3, -0.2), (1.0, 2.0), (-0.7, -0.4)]:
        assert f_series(y, z) == pytest.approx(f_eval(y, z), rel=1e-9, abs=1e-12)


def test_f_bounds_on_grids():
    grid = np.linspace(-1, 10, 60)
    for y in grid:
        for z in grid:
            assert f_eval(y, z) <= f_upper(y, z)
    grid = np.linspace(-5, 5, 60)
    for y in grid:
        for z in grid:
            if y <= -1 or z <= -1:
                assert f_eval(y, z) <= 0


def test_moments():
    assert moment_estimate([([1.0], [2.0])], 0, 0).exact == 1
    point = ([Fraction(1, 2), Fraction(1)], [Fraction(3)])
    est = moment_estimate([point], 2, 1)
    assert est.exact == (Fraction(5, 4)) ** 2 * 9
    rng = XorShiftRNG(2)
    support = [(random_family(rng, 1, 3, 1.0)[0], random_family(rng, 1, 2, 1.0)[0]) for _ in range(8)]
    for a in range(4):
        for b in range(4):
            assert moment_estimate(support, a, b).exact >= 0
    mc = moment_estimate(support, 1, 1, n_samples=4000, seed=3)
    exact = moment_estimate(support, 1, 1).mean
    assert abs(mc.mean - exact) < 5 * mc.std_error + 1e-12


def test_mean_inner_identity():
    rng = XorShiftRNG(8)
    vecs = random_family(rng, 7, 4, 1.0)
    lhs, rhs = mean_inner_identity(vecs)
    assert lhs == rhs and lhs >= 0
