"""The book algorithm: v1, cutoff-mu and off-diagonal variants.

State is four disjoint sets A, B, X, Y with (A, X u Y) a red book and (B, X)
a blue book.  Each iteration either takes a blue step (some v in X has many
blue neighbours in X), a red step (some v in X is *prosperous*: restricting to
its red neighbourhood does not drop the red density between X and Y by more
than alpha), or a density-boost step.

Assumptions that the analysis needs but real colorings do not satisfy (degree
regularity, a good initial density) are never enforced; their consequences
are reported by :func:`trace_report`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from .coloring import Color, DomainError, EdgeColoring, members
from .search import BookWitness, CliqueWitness
from .trace import exact

HALF = Fraction(1, 2)


# parameters ---------------------------------------------------------------


@dataclass(frozen=True)
class BookVariant:
    name: str  # "v1" | "cutoff" | "offdiag"
    k: int
    mu: Fraction
    ell: Optional[int] = None
    eps: Optional[float] = None
    allow_swap: bool = True
    choice: str = "least"  # or "max_gain"
    guard: Fraction = Fraction(0)

    @classmethod
    def v1(cls, k: int, **kw) -> "BookVariant":
        return cls("v1", k, HALF, **kw)

    @classmethod
    def cutoff(cls, k: int, mu: "float | Fraction", **kw) -> "BookVariant":
        mu = Fraction(mu)
        if not 0 < mu <= 1:
            raise DomainError("mu must lie in (0, 1]")
        return cls("cutoff", k, mu, **kw)

    @classmethod
    def offdiag(cls, k: int, ell: int, **kw) -> "BookVariant":
        if not 1 <= ell <= k:
            raise DomainError("need 1 <= ell <= k")
        kw.setdefault("allow_swap", False)
        return cls("offdiag", k, Fraction(ell, k + ell), ell=ell, **kw)

    @property
    def epsilon(self) -> float:
        return self.eps if self.eps is not None else self.k ** -0.25

    @property
    def blue_limit(self) -> int:
        return self.ell if self.name == "offdiag" else self.k

    def params(self) -> dict:
        return {
            "variant": self.name,
            "k": self.k,
            "ell": self.ell,
            "mu": exact(self.mu),
            "eps": self.epsilon,
            "allow_swap": self.allow_swap,
            "choice": self.choice,
            "guard": exact(self.guard),
        }


def alpha(p: "Fraction | float", eps: float, k: int, base: "Fraction | float" = HALF) -> float:
    """Adaptive loss allowance: eps/k if p <= base + 1/k, else eps (p - base).

    ``base`` is 1/2 for the diagonal algorithm and p_initial off the diagonal.
    The regime test is exact when ``p`` and ``base`` are rationals.
    """
    p = Fraction(p)
    base = Fraction(base)
    if p <= base + Fraction(1, k):
        return eps / k
    return eps * float(p - base)


# state and records --------------------------------------------------------


@dataclass
class BookState:
    A: list[int]
    B: list[int]
    X: int
    Y: int
    p: Optional[Fraction]
    eps: float
    mu: Fraction
    p_initial: Optional[Fraction]
    t: int = 0
    s: int = 0
    b: int = 0
    swapped: bool = False

    def sizes(self) -> tuple[int, int]:
        return self.X.bit_count(), self.Y.bit_count()


@dataclass
class StepRecord:
    kind: str  # red | blue | boost | es-red | es-blue
    vertex: int
    beta: Optional[Fraction]
    alpha: Optional[float]
    p_before: Optional[Fraction]
    p_after: Optional[Fraction]
    x_before: int
    x_after: int
    y_before: int
    y_after: int
    prosperous: bool = False
    blue_neighbors: int = 0
    s_size: Optional[int] = None
    t_size: Optional[int] = None
    u_size: Optional[int] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("beta", "p_before", "p_after"):
            d[key + "_exact"] = exact(d[key])
        return d


@dataclass
class BookResult:
    outcome: str  # red_clique | blue_clique | exhausted
    witness: "CliqueWitness | BookWitness | None"
    state: BookState
    records: list[StepRecord]
    variant: BookVariant
    n: int
    x0: int
    y0: int


@dataclass(frozen=True)
class Decision:
    kind: str  # blue | red | boost | exhausted
    vertex: Optional[int] = None
    blue_neighbors: int = 0
    p_new: Optional[Fraction] = None


# core ---------------------------------------------------------------------


def _density(red, xs: int, ys: int) -> Optional[Fraction]:
    if not xs or not ys:
        return None
    e = 0
    rest = xs
    while rest:
        low = rest & -rest
        e += (red[low.bit_length() - 1] & ys).bit_count()
        rest ^= low
    return Fraction(e, xs.bit_count() * ys.bit_count())


def _alpha_for(state: BookState, variant: BookVariant) -> float:
    base = state.p_initial if variant.name == "offdiag" else HALF
    return alpha(state.p, state.eps, variant.k, base)


def classify_step(coloring: EdgeColoring, state: BookState, variant: BookVariant) -> Decision:
    """Pick the next step: blue if possible, else a prosperous red step, else boost."""
    size = state.X.bit_count()
    if size < 2 or not state.Y:
        return Decision("exhausted")
    red, blue = coloring.red, coloring.blue
    need_blue = math.ceil(variant.mu * (size - 1))
    for v in members(state.X):
        nb = (blue[v] & state.X).bit_count()
        if nb >= need_blue:
            return Decision("blue", v, nb)

    floor = state.p - Fraction(_alpha_for(state, variant)) - variant.guard
    best: Optional[Decision] = None
    for v in members(state.X):
        T = red[v] & state.X
        U = red[v] & state.Y
        if not T or not U:
            continue
        p_new = _density(red, T, U)
        if p_new >= floor:
            cand = Decision("red", v, (blue[v] & state.X).bit_count(), p_new)
            if variant.choice != "max_gain":
                return cand
            if best is None or p_new > best.p_new:
                best = cand
    if best is not None:
        return best
    v = (state.X & -state.X).bit_length() - 1
    return Decision("boost", v, (blue[v] & state.X).bit_count())


def books_hold(coloring: EdgeColoring, state: BookState) -> bool:
    """(A, X u Y) red book, (B, X) blue book, all four sets disjoint (working colors)."""
    a = sum(1 << v for v in state.A)
    b = sum(1 << v for v in state.B)
    sets = [a, b, state.X, state.Y]
    for i in range(4):
        for j in range(i + 1, 4):
            if sets[i] & sets[j]:
                return False
    for v in state.A:
        need = (a & ~(1 << v)) | state.X | state.Y
        if coloring.red[v] & need != need:
            return False
    for v in state.B:
        need = (b & ~(1 << v)) | state.X
        if coloring.blue[v] & need != need:
            return False
    return True


def _initial_state(coloring: EdgeColoring, variant: BookVariant) -> tuple[EdgeColoring, BookState]:
    n = coloring.n
    half = (n + 1) // 2
    X = (1 << half) - 1
    Y = coloring.full & ~X
    p = _density(coloring.red, X, Y)
    swapped = False
    if variant.name != "offdiag" and variant.allow_swap and p < HALF:
        coloring = coloring.swapped()
        p = 1 - p
        swapped = True
    state = BookState([], [], X, Y, p, variant.epsilon, variant.mu, p, swapped=swapped)
    return coloring, state


def _offdiag_prelude(
    coloring: EdgeColoring, state: BookState, variant: BookVariant, records: list, check
) -> None:
    """Off-diagonal ES steps (gamma = mu) until d_R(X, Y) >= 1 - mu."""
    gamma = variant.mu
    red, blue = coloring.red, coloring.blue
    while (
        state.p is not None
        and state.p < 1 - gamma
        and state.X.bit_count() > 1
        and len(state.A) < variant.k
        and len(state.B) < variant.blue_limit
    ):
        x0, y0 = state.sizes()
        v = (state.X & -state.X).bit_length() - 1
        rest = state.X & ~(1 << v)
        reds = (red[v] & rest).bit_count()
        p_before = state.p
        if reds >= math.ceil((1 - gamma) * (x0 - 1)):
            kind = "es-red"
            state.A.append(v)
            state.X = red[v] & rest
            state.Y &= red[v]
        else:
            kind = "es-blue"
            state.B.append(v)
            state.X = blue[v] & rest
        state.p = _density(red, state.X, state.Y)
        x1, y1 = state.sizes()
        records.append(
            StepRecord(kind, v, None, None, p_before, state.p, x0, x1, y0, y1,
                       blue_neighbors=(blue[v] & rest).bit_count())
        )
        check(state)
    state.p_initial = state.p


def run_book(
    coloring: EdgeColoring, variant: BookVariant, check_invariants: bool = False
) -> BookResult:
    """Run the book algorithm to completion.

    Returns the outcome in the coloring's original colors: a red or blue
    clique if A or B reached its bound, otherwise ``exhausted`` with the final
    red book (A, Y) as a witness candidate.
    """
    if coloring.n < 4:
        raise DomainError("the book algorithm needs N >= 4")
    work, state = _initial_state(coloring, variant)
    x0, y0 = state.sizes()
    records: list[StepRecord] = []

    def check(st: BookState) -> None:
        if check_invariants and not books_hold(work, st):
            raise AssertionError(f"book invariant broken after step {len(records)}")

    check(state)
    if variant.name == "offdiag":
        _offdiag_prelude(work, state, variant, records, check)

    red, blue = work.red, work.blue
    while True:
        if len(state.A) >= variant.k or len(state.B) >= variant.blue_limit:
            break
        decision = classify_step(work, state, variant)
        if decision.kind == "exhausted":
            break
        v = decision.vertex
        x_b, y_b = state.sizes()
        p_b = state.p
        a_used = _alpha_for(state, variant)
        rest = state.X & ~(1 << v)
        beta = None
        s_size = t_size = u_size = None
        if decision.kind == "blue":
            state.B.append(v)
            state.X = blue[v] & rest
            state.b += 1
            beta = Fraction(decision.blue_neighbors, x_b - 1)
        elif decision.kind == "red":
            state.A.append(v)
            state.X = red[v] & rest
            state.Y &= red[v]
            state.t += 1
        else:
            s_size = (blue[v] & rest).bit_count()
            t_size = (red[v] & rest).bit_count()
            u_size = (red[v] & state.Y).bit_count()
            beta = Fraction(s_size, x_b - 1)
            state.B.append(v)
            state.X = blue[v] & rest
            state.Y &= red[v]
            state.s += 1
        state.p = _density(red, state.X, state.Y)
        x_a, y_a = state.sizes()
        records.append(
            StepRecord(
                decision.kind, v, beta, a_used, p_b, state.p, x_b, x_a, y_b, y_a,
                prosperous=decision.kind == "red",
                blue_neighbors=decision.blue_neighbors,
                s_size=s_size, t_size=t_size, u_size=u_size,
            )
        )
        check(state)

    red_c = Color.BLUE if state.swapped else Color.RED
    if len(state.A) >= variant.k:
        outcome, witness = "red_clique", CliqueWitness(red_c, tuple(sorted(state.A)))
    elif len(state.B) >= variant.blue_limit:
        outcome, witness = "blue_clique", CliqueWitness(red_c.other, tuple(sorted(state.B)))
    else:
        outcome = "exhausted"
        witness = BookWitness(red_c, tuple(sorted(state.A)), tuple(members(state.Y)))
    if state.swapped:
        outcome = {"red_clique": "blue_clique", "blue_clique": "red_clique"}.get(outcome, outcome)
    return BookResult(outcome, witness, state, records, variant, coloring.n, x0, y0)


# diagnostics --------------------------------------------------------------


@dataclass
class TraceReport:
    steps: int = 0
    red_steps: int = 0
    blue_steps: int = 0
    boost_steps: int = 0
    es_steps: int = 0
    p_min: Optional[float] = None
    p_floor: Optional[float] = None
    p_floor_ok: Optional[bool] = None
    y_final: Optional[int] = None
    y_lemma_bound: Optional[float] = None
    y_lemma_ok: Optional[bool] = None
    x_final: Optional[int] = None
    x_lemma_bound: Optional[float] = None
    x_lemma_ok: Optional[bool] = None
    x_bookkeeping_ok: Optional[bool] = None
    zigzag: Optional[float] = None
    zigzag_minus_t: Optional[float] = None
    harmonic_beta: Optional[float] = None
    beta_lower_bound: Optional[float] = None
    small_s: Optional[bool] = None
    red_contract_violations: int = 0
    boost_beta_violations: int = 0
    boost_gain_shortfalls: int = 0
    blue_threshold_violations: int = 0
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def trace_report(records: list[StepRecord], variant: BookVariant, x0: int = 0, y0: int = 0) -> TraceReport:
    """Compare a run against the analysis, step by step, without o(k) slack.

    Contracts that hold by construction (red-step density drop <= alpha,
    boost beta < mu, blue threshold) are counted as violations and must be 0.
    Lemma-shaped bounds that rely on the unenforced regularity assumptions
    are reported as booleans only.
    """
    rep = TraceReport()
    if not records:
        return rep
    eps = variant.epsilon
    k = variant.k
    mu = variant.mu
    main = [r for r in records if not r.kind.startswith("es-")]
    rep.steps = len(records)
    rep.es_steps = len(records) - len(main)
    rep.red_steps = sum(r.kind == "red" for r in main)
    rep.blue_steps = sum(r.kind == "blue" for r in main)
    rep.boost_steps = sum(r.kind == "boost" for r in main)
    x0 = x0 or records[0].x_before
    y0 = y0 or records[0].y_before

    # p floor: p >= base - eps throughout
    ps = [r.p_before for r in main if r.p_before is not None] + [
        r.p_after for r in main if r.p_after is not None
    ]
    if variant.name == "offdiag":
        base = main[0].p_before if main and main[0].p_before is not None else None
    else:
        base = HALF
    if ps and base is not None:
        rep.p_min = float(min(ps))
        rep.p_floor = float(base) - eps
        rep.p_floor_ok = rep.p_min >= rep.p_floor

    # exact per-step contracts
    for r in main:
        if r.kind == "red" and r.p_after is not None and r.p_after < r.p_before - Fraction(r.alpha) - variant.guard:
            rep.red_contract_violations += 1
        if r.kind == "boost" and r.beta is not None and r.beta > mu:
            rep.boost_beta_violations += 1
        if r.kind == "blue" and r.blue_neighbors < math.ceil(mu * (r.x_before - 1)):
            rep.blue_threshold_violations += 1
        if r.kind == "boost" and r.beta and r.p_after is not None:
            target = Fraction(r.alpha) * (1 - r.beta) / r.beta
            if r.p_after - r.p_before < target:
                rep.boost_gain_shortfalls += 1

    # Y size: |Y| >= (base - eps)^(t+s) |Y0|
    t, s, b = rep.red_steps, rep.boost_steps, rep.blue_steps
    last = records[-1]
    rep.y_final = last.y_after
    y_start = main[0].y_before if main else y0
    if base is not None:
        rep.y_lemma_bound = max(float(base) - eps, 0.0) ** (t + s) * y_start
        rep.y_lemma_ok = rep.y_final >= rep.y_lemma_bound

    # X size: |X| >= (1-mu)^t mu^b prod(beta_i) |X0| and exact bookkeeping identity
    rep.x_final = last.x_after
    x_start = main[0].x_before if main else x0
    betas = [r.beta for r in main if r.kind == "boost"]
    prod_beta = Fraction(1)
    for beta in betas:
        prod_beta *= beta
    rep.x_lemma_bound = float((1 - mu) ** t * mu ** b * prod_beta * x_start)
    rep.x_lemma_ok = rep.x_final >= rep.x_lemma_bound
    ratio = Fraction(1)
    for r in records:
        ratio *= Fraction(r.x_after, r.x_before)
    rep.x_bookkeeping_ok = ratio * records[0].x_before == last.x_after

    # zig-zag statistic and harmonic-mean beta
    if betas:
        if any(beta == 0 for beta in betas):
            rep.zigzag = math.inf
            rep.harmonic_beta = 0.0
            rep.notes.append("boost step with beta = 0 (X emptied)")
        else:
            zz = sum((1 - beta) / beta for beta in betas)
            rep.zigzag = float(zz)
            rep.harmonic_beta = float(Fraction(s) / sum(1 / beta for beta in betas))
        rep.zigzag_minus_t = rep.zigzag - t
        rep.beta_lower_bound = s / (s + t) if s + t else None
        rep.small_s = s < max(1, round(k ** 0.5))
        if rep.small_s:
            rep.notes.append("few boost steps: beta lower bound not meaningful")
    else:
        rep.zigzag = 0.0
        rep.zigzag_minus_t = -float(t)
    return rep
