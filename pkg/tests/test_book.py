from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest

from ramsey_books.book import (
    BookState,
    BookVariant,
    StepRecord,
    _density,
    _initial_state,
    alpha,
    books_hold,
    classify_step,
    run_book,
    trace_report,
)
from ramsey_books.coloring import Color, DomainError, EdgeColoring, generate, members


def test_alpha_branches():
    assert alpha(Fraction(1, 2), 0.1, 100) == pytest.approx(0.001)
    assert alpha(Fraction(3, 4), 0.1, 100) == pytest.approx(0.025)
    assert alpha(Fraction(3, 5), 0.2, 10, base=Fraction(3, 5)) == pytest.approx(0.02)
    # boundary p = 1/2 + 1/k is in the first branch, exactly
    assert alpha(Fraction(1, 2) + Fraction(1, 10), 0.1, 10) == pytest.approx(0.01)


def _state(col, X, Y, mu=Fraction(1, 2), eps=0.1):
    p = _density(col.red, X, Y)
    return BookState([], [], X, Y, p, eps, mu, p)


def test_classify_all_red_takes_red_step():
    col = generate(10, "all_red")
    d = classify_step(col, _state(col, 0b11111, 0b1111100000), BookVariant.v1(4))
    assert d.kind == "red" and d.vertex == 0


def test_classify_blue_inside_x():
    col = generate(10, "all_blue")
    d = classify_step(col, _state(col, 0b11111, 0b1111100000), BookVariant.v1(4))
    assert d.kind == "blue" and d.vertex == 0


def test_classify_exhausted():
    col = generate(10, "all_red")
    assert classify_step(col, _state(col, 0b1, 0b110), BookVariant.v1(4)).kind == "exhausted"


def _boost_instance():
    """8-vertex X whose internal edges are mostly red but every red step drops the density.

    Found by search over small colorings; conditions re-verified below."""
    for seed in itertools.count():
        col = _regular_boost_coloring(seed)
        var = BookVariant.v1(4, eps=0.1)
        work, st = _initial_state(col, var)
        if not st.swapped and classify_step(work, st, var).kind == "boost":
            return work, st, var


def test_classify_boost_when_nothing_else_applies():
    col, st, var = _boost_instance()
    d = classify_step(col, st, var)
    assert d.kind == "boost"
    # independent re-check: no vertex has enough blue neighbours, none is prosperous
    size = st.X.bit_count()
    floor = st.p - Fraction(alpha(st.p, var.epsilon, var.k))
    for v in members(st.X):
        assert (col.blue[v] & st.X).bit_count() < math.ceil(Fraction(size - 1, 2))
        T, U = col.red[v] & st.X, col.red[v] & st.Y
        if T and U:
            reds = sum((col.red[w] & U).bit_count() for w in members(T))
            assert Fraction(reds, T.bit_count() * U.bit_count()) < floor


def _regular_boost_coloring(seed: int) -> EdgeColoring:
    """X = 0..7, Y = 8..15 with vertex 0 red to U = 8..11 and blue to W = 12..15.

    Rows of X' = 1..7 have a fixed number of red neighbours in U (1 for the red
    neighbours of 0, 4 for its blue neighbours) and 12 red edges into W in
    total, so d_R(X', U) = 4/7 >= p = 1/2: the degree-regularity consequence
    the density-boost estimate relies on.
    """
    rnd = random.Random(seed)
    n = 16
    red = [[False] * n for _ in range(n)]

    def setr(a, b):
        red[a][b] = red[b][a] = True

    T = [4, 5, 6, 7]
    U, W = [8, 9, 10, 11], [12, 13, 14, 15]
    for v in T + U:
        setr(0, v)
    for a, b in itertools.combinations(range(1, 8), 2):
        if rnd.random() < 0.7:
            setr(a, b)
    bs = [2] * 6 + [0]
    rnd.shuffle(bs)
    for w, bw in zip(range(1, 8), bs):
        for u in rnd.sample(U, 1 if w in T else 4):
            setr(w, u)
        for x in rnd.sample(W, bw):
            setr(w, x)
    for a, b in itertools.combinations(range(8, 16), 2):
        if rnd.random() < 0.5:
            setr(a, b)
    return EdgeColoring(n, tuple(sum(1 << j for j in range(n) if red[i][j]) for i in range(n)))


def test_boost_gain_under_regularity():
    col, st, var = _boost_instance()
    v = classify_step(col, st, var).vertex
    rest = st.X & ~(1 << v)
    S, U = col.blue[v] & rest, col.red[v] & st.Y
    assert _density(col.red, rest, U) >= st.p  # the regularity consequence holds
    beta = Fraction(S.bit_count(), rest.bit_count())
    a = Fraction(alpha(st.p, var.epsilon, var.k))
    assert _density(col.red, S, U) >= st.p + a * (1 - beta) / beta
    # and the algorithm's own diagnostic agrees
    res = run_book(col, var)
    assert res.records[0].kind == "boost"
    first = trace_report(res.records[:1], var)
    assert first.boost_gain_shortfalls == 0


def test_all_red_v1_run():
    col = generate(32, "all_red")
    res = run_book(col, BookVariant.v1(5), check_invariants=True)
    assert res.outcome == "red_clique" and res.witness.k == 5
    assert [r.kind for r in res.records] == ["red"] * 5
    assert all(r.p_after == 1 for r in res.records)
    rep = trace_report(res.records, res.variant)
    assert rep.boost_steps == 0 and rep.p_floor_ok and rep.y_lemma_ok and rep.x_bookkeeping_ok


def test_all_blue_v1_run_with_and_without_swap():
    col = generate(32, "all_blue")
    res = run_book(col, BookVariant.v1(5, allow_swap=False), check_invariants=True)
    assert res.outcome == "blue_clique"
    assert [r.kind for r in res.records] == ["blue"] * 5
    assert all(r.y_after == r.y_before for r in res.records)
    swapped = run_book(col, BookVariant.v1(5), check_invariants=True)
    assert swapped.state.swapped and swapped.outcome == "blue_clique"
    assert swapped.witness.color is Color.BLUE and swapped.witness.validate(col)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("make", [
    lambda: BookVariant.v1(6),
    lambda: BookVariant.cutoff(6, Fraction(2, 5)),
    lambda: BookVariant.offdiag(8, 4),
    lambda: BookVariant.v1(6, choice="max_gain"),
])
def test_random_runs_keep_contracts(seed, make):
    variant = make()
    col = generate(512, "random", seed=seed, p_red=0.5 + 0.05 * (seed % 3))
    res = run_book(col, variant, check_invariants=True)
    assert res.outcome in ("red_clique", "blue_clique", "exhausted")
    assert res.witness.validate(col)
    assert len(res.records) <= col.n
    rep = trace_report(res.records, variant, res.x0, res.y0)
    assert rep.red_contract_violations == 0
    assert rep.boost_beta_violations == 0
    assert rep.blue_threshold_violations == 0
    assert rep.x_bookkeeping_ok
    for r in res.records:
        assert r.x_after < r.x_before and r.y_after <= r.y_before
        if r.beta is not None:
            assert 0 <= r.beta <= 1


def test_red_heavy_runs_exercise_red_and_boost_steps():
    kinds = set()
    for seed in range(10):
        col = generate(256, "random", seed=seed, p_red=0.7)
        res = run_book(col, BookVariant.cutoff(8, Fraction(1, 5), eps=0.5), check_invariants=True)
        kinds |= {r.kind for r in res.records}
        rep = trace_report(res.records, res.variant)
        assert rep.red_contract_violations == 0 and rep.boost_beta_violations == 0
    assert {"red", "blue"} <= kinds


def test_offdiag_prelude_reaches_density_target():
    col = generate(300, "random", seed=2, p_red=0.3)
    var = BookVariant.offdiag(6, 3)  # mu = 1/3, target density 2/3
    res = run_book(col, var, check_invariants=True)
    es = [r for r in res.records if r.kind.startswith("es-")]
    assert es
    main = [r for r in res.records if not r.kind.startswith("es-")]
    if main:
        assert main[0].p_before >= 1 - var.mu


def test_trace_report_zigzag_with_half_betas():
    recs = [
        StepRecord("boost", i, Fraction(1, 2), 0.01, Fraction(1, 2), Fraction(3, 5), 100 - 2 * i, 99 - 2 * i, 50, 40)
        for i in range(4)
    ]
    rep = trace_report(recs, BookVariant.v1(10))
    assert rep.zigzag == pytest.approx(4.0)
    assert rep.harmonic_beta == pytest.approx(0.5)
    assert rep.boost_steps == 4


def test_trace_report_empty():
    rep = trace_report([], BookVariant.v1(5))
    assert rep.steps == 0


def test_book_errors():
    with pytest.raises(DomainError):
        run_book(generate(3, "all_red"), BookVariant.v1(3))
    with pytest.raises(DomainError):
        BookVariant.cutoff(5, 0)
    with pytest.raises(DomainError):
        BookVariant.offdiag(5, 6)


def test_books_hold_detects_violation():
    col = generate(10, "all_blue")
    st = BookState([0], [], 0b1110, 0b1110000, Fraction(0), 0.1, Fraction(1, 2), Fraction(0))
    assert not books_hold(col, st)
