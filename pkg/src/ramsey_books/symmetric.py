"""The symmetric book algorithm and its refinement step.

Five disjoint sets A, B, X, Y, Z are kept with (A, X u Y) a red book and
(B, X u Z) a blue book.  Every iteration first finds a refinement witness
(v, X', kappa): X' is the set of w in X whose common red neighbourhood with v
inside Y and common blue neighbourhood inside Z are both large, and X' must
keep at least a c 2^{-C kappa} fraction of X.  Large kappa triggers a density
boost in one color; small kappa a red or blue step through v.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .book import alpha as _alpha
from .coloring import Color, DomainError, EdgeColoring, members
from .geometry import C_EXP, C_SMALL, kappa_grid, meets_geometric_bound
from .search import BookWitness
from .trace import exact

HALF = Fraction(1, 2)


def _density(adj, xs: int, ys: int) -> Optional[Fraction]:
    if not xs or not ys:
        return None
    e = 0
    for x in members(xs):
        e += (adj[x] & ys).bit_count()
    return Fraction(e, xs.bit_count() * ys.bit_count())


def _indicator(adj, rows: list[int], cols: list[int]) -> np.ndarray:
    out = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, v in enumerate(rows):
        nb = adj[v]
        for j, y in enumerate(cols):
            if (nb >> y) & 1:
                out[i, j] = 1
    return out


def _ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


# refinement ---------------------------------------------------------------


@dataclass
class RefinementWitness:
    vertex: int
    x_prime: int
    kappa: Fraction
    orientation: Color  # which color's common neighbourhood carries the kappa threshold
    boosted_color: Optional[Color]  # clause (c) color, None if neither holds
    clause_a: bool
    clause_b_red: Optional[bool]
    clause_b_blue: Optional[bool]
    p_R: Fraction
    p_B: Fraction
    d_R_new: Optional[Fraction]
    d_B_new: Optional[Fraction]
    mode: str  # grid | breakpoint

    @property
    def x_prime_size(self) -> int:
        return self.x_prime.bit_count()


@dataclass
class RefinementFailure:
    reason: str
    best_vertex: Optional[int]
    best_kappa: Optional[Fraction]
    best_margin: Optional[float]  # log2(|X'| / (c 2^{-C kappa} |X|)) at the best pair tried


class _Grams:
    """Common-neighbourhood counts for all ordered pairs of X, both colors."""

    def __init__(self, coloring: EdgeColoring, X: int, Y: int, Z: int):
        self.rows = members(X)
        IY = _indicator(coloring.red, self.rows, members(Y))
        IZ = _indicator(coloring.blue, self.rows, members(Z))
        self.GY = IY @ IY.T
        self.GZ = IZ @ IZ.T


def _thresholds(p: Fraction, a: Fraction, size: int, kappa: Fraction) -> int:
    return _ceil_frac((p + (kappa * kappa - 1) * a) * p * size)


def refinement_witness(
    coloring: EdgeColoring,
    X, Y, Z,
    alpha_R: float,
    alpha_B: float,
    search: str = "grid",
    dk: "float | Fraction" = Fraction(1, 4),
    kmax: "float | Fraction" = 1200,
    max_halvings: int = 4,
    c: Fraction = C_SMALL,
    C: int = C_EXP,
    _grams: Optional[_Grams] = None,
) -> "RefinementWitness | RefinementFailure":
    """Least (kappa, v) refinement witness, red orientation first at ties.

    For orientation red, X'(v, kappa) = {w in X : |N_Y(v) & N_Y(w)| >=
    (p_R + (kappa^2-1) alpha_R) p_R |Y| and |N_Z(v) & N_Z(w)| >= (p_B - alpha_B)
    p_B |Z|}; orientation blue swaps the roles.  Clause (a) |X'| >= c 2^{-C
    kappa} |X| is tested exactly; clauses (b) and (c) are then evaluated with
    exact densities and reported (they need not hold without left regularity).
    ``search="exhaustive"`` skips the grid and goes straight to the exact
    breakpoint search.
    """
    from .coloring import vset

    X, Y, Z = vset(X), vset(Y), vset(Z)
    if not X or not Y or not Z:
        raise DomainError("X, Y, Z must be non-empty")
    if X & Y or X & Z or Y & Z:
        raise DomainError("X, Y, Z must be disjoint")
    if not (0 < alpha_R < 1 and 0 < alpha_B < 1):
        raise DomainError("alpha_R and alpha_B must lie in (0, 1)")
    p_R = _density(coloring.red, X, Y)
    p_B = _density(coloring.blue, X, Z)
    aR, aB = Fraction(alpha_R), Fraction(alpha_B)
    sY, sZ = Y.bit_count(), Z.bit_count()
    g = _grams or _Grams(coloring, X, Y, Z)
    rows = g.rows
    nX = len(rows)
    # fixed "no drop" masks for the non-boosted color
    base_Z = g.GZ >= _thresholds(p_B, aB, sZ, Fraction(0))
    base_Y = g.GY >= _thresholds(p_R, aR, sY, Fraction(0))
    orients = ((Color.RED, g.GY, base_Z, p_R, aR, sY), (Color.BLUE, g.GZ, base_Y, p_B, aB, sZ))

    def finish(i: int, kappa: Fraction, orient: Color, mode: str) -> RefinementWitness:
        v = rows[i]
        _, G, base, p, a, size = orients[0] if orient is Color.RED else orients[1]
        mask_row = (G[i] >= _thresholds(p, a, size, kappa)) & base[i]
        xp = sum(1 << rows[j] for j in np.flatnonzero(mask_row))
        return _verify(coloring, v, xp, kappa, orient, X, Y, Z, p_R, p_B, aR, aB, mode, c, C)

    if search == "grid":
        step = Fraction(dk).limit_denominator(1 << 20)
        top = Fraction(kmax).limit_denominator(1 << 20)
        for _ in range(max_halvings + 1):
            for kappa in kappa_grid(step, top):
                for orient, G, base, p, a, size in orients:
                    thr = _thresholds(p, a, size, kappa)
                    counts = ((G >= thr) & base).sum(axis=1)
                    for i in range(nX):
                        if counts[i] and meets_geometric_bound(int(counts[i]), nX, kappa, c, C):
                            return finish(i, kappa, orient, "grid")
                    # per-orientation tie rule: all v for red, then all v for blue
            step /= 2
    elif search != "exhaustive":
        raise DomainError(f"unknown search mode {search!r}")

    # exact breakpoint search over (v, j): least real kappa, rounded up to 2^-30
    best = None
    for orient, G, base, p, a, size in orients:
        pf, af = float(p), float(a)
        for i in range(nX):
            vals = np.sort(G[i][base[i]])[::-1]
            for j, gj in enumerate(vals, start=1):
                # kappa^2 <= 1 + (g/(p|T|) - p)/a
                if p == 0:
                    break
                hi2 = 1 + (gj / (pf * size) - pf) / af
                if hi2 < 0:
                    break
                # clause (a) with j qualifying w: j/|X| >= c 2^{-C kappa}
                lo = max(0.0, math.log2(float(c) * nX / j) / C)
                if lo * lo <= hi2:
                    cand = Fraction(math.ceil(lo * 2 ** 30), 2 ** 30)
                    key = (cand, 0 if orient is Color.RED else 1, i)
                    if best is None or key < best:
                        best = key
    if best is not None:
        kappa, o, i = best
        w = finish(i, kappa, Color.RED if o == 0 else Color.BLUE, "breakpoint")
        if w.clause_a:
            return w
    return _failure(g, orients, nX, c, C)


def _failure(g, orients, nX, c, C) -> RefinementFailure:
    best = (None, None, -math.inf)
    for orient, G, base, p, a, size in orients:
        counts = ((G >= _thresholds(p, a, size, Fraction(0))) & base).sum(axis=1)
        for i in range(nX):
            if counts[i]:
                margin = math.log2(counts[i] / (float(c) * nX))
                if margin > best[2]:
                    best = (g.rows[i], Fraction(0), margin)
    return RefinementFailure("no clause-(a) witness found", *best)


def _verify(coloring, v, xp, kappa, orient, X, Y, Z, p_R, p_B, aR, aB, mode, c, C) -> RefinementWitness:
    Yp = Y & coloring.red[v]
    Zp = Z & coloring.blue[v]
    dR = _density(coloring.red, xp, Yp)
    dB = _density(coloring.blue, xp, Zp)
    clause_a = meets_geometric_bound(xp.bit_count(), X.bit_count(), kappa, c, C)
    b_red = None if dR is None else dR >= p_R - aR
    b_blue = None if dB is None else dB >= p_B - aB
    boost = kappa * kappa - 1
    boosted = None
    if dR is not None and dR >= p_R + boost * aR:
        boosted = Color.RED
    elif dB is not None and dB >= p_B + boost * aB:
        boosted = Color.BLUE
    return RefinementWitness(v, xp, kappa, orient, boosted, clause_a, b_red, b_blue, p_R, p_B, dR, dB, mode)


# the algorithm ------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricParams:
    k: int
    eta: Fraction = Fraction(1, 8000)
    kappa_cutoff: Fraction = Fraction(400)
    eps: Optional[float] = None
    dk: Fraction = Fraction(1, 4)
    kmax: Optional[Fraction] = None
    c: Fraction = C_SMALL
    C: int = C_EXP

    @property
    def t(self) -> int:
        return math.ceil(Fraction(self.eta) * self.k)

    @property
    def epsilon(self) -> float:
        return self.eps if self.eps is not None else self.t ** -0.25

    @property
    def kappa_max(self) -> Fraction:
        return Fraction(self.kmax) if self.kmax is not None else 3 * Fraction(self.kappa_cutoff)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "t": self.t,
            "eta": exact(Fraction(self.eta)),
            "kappa_cutoff": exact(Fraction(self.kappa_cutoff)),
            "eps": self.epsilon,
            "dk": exact(Fraction(self.dk)),
            "kmax": exact(self.kappa_max),
            "c": exact(Fraction(self.c)),
            "C": self.C,
        }


@dataclass
class SymmetricState:
    A: list[int]
    B: list[int]
    X: int
    Y: int
    Z: int
    p_R: Optional[Fraction] = None
    p_B: Optional[Fraction] = None
    t_red: int = 0
    t_blue: int = 0
    s_R: int = 0
    s_B: int = 0
    kappa_R: list = field(default_factory=list)
    kappa_B: list = field(default_factory=list)


@dataclass
class SymmetricRecord:
    kind: str  # red | blue | red-boost | blue-boost
    vertex: int
    kappa: Fraction
    x_prime_size: int
    x_before: int
    x_after: int
    y_before: int
    y_after: int
    z_before: int
    z_after: int
    p_R_before: Optional[Fraction] = None
    p_R_after: Optional[Fraction] = None
    p_B_before: Optional[Fraction] = None
    p_B_after: Optional[Fraction] = None
    alpha_R: Optional[float] = None
    alpha_B: Optional[float] = None
    clause_a: bool = True
    clause_b_red: Optional[bool] = None
    clause_b_blue: Optional[bool] = None
    clause_c_color: Optional[str] = None
    orientation: Optional[str] = None
    mode: str = "grid"

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("kappa", "p_R_before", "p_R_after", "p_B_before", "p_B_after"):
            d[key + "_exact"] = exact(d[key])
        return d


@dataclass
class SymmetricResult:
    outcome: str  # red_book | blue_book | exhausted | refinement_failure | stalled
    witness: Optional[BookWitness]
    state: SymmetricState
    records: list[SymmetricRecord]
    params: SymmetricParams
    n: int
    sizes0: tuple[int, int, int]
    failure: Optional[RefinementFailure] = None


def symmetric_books_hold(coloring: EdgeColoring, st: SymmetricState) -> bool:
    a = sum(1 << v for v in st.A)
    b = sum(1 << v for v in st.B)
    sets = [a, b, st.X, st.Y, st.Z]
    for i in range(5):
        for j in range(i + 1, 5):
            if sets[i] & sets[j]:
                return False
    for v in st.A:
        need = (a & ~(1 << v)) | st.X | st.Y
        if coloring.red[v] & need != need:
            return False
    for v in st.B:
        need = (b & ~(1 << v)) | st.X | st.Z
        if coloring.blue[v] & need != need:
            return False
    return True


def sym_alpha(p: Fraction, eps: float, t: int) -> float:
    return _alpha(p, eps, t, HALF)


def run_symmetric(
    coloring: EdgeColoring,
    k: int,
    eta: "float | Fraction" = Fraction(1, 8000),
    kappa_cutoff: "float | Fraction" = 400,
    eps: Optional[float] = None,
    dk: "float | Fraction" = Fraction(1, 4),
    kmax: "float | Fraction | None" = None,
    check_invariants: bool = False,
    partition: Optional[tuple[int, int, int]] = None,
) -> SymmetricResult:
    """Run the symmetric book algorithm; stops when |A| or |B| reaches t = ceil(eta k)."""
    params = SymmetricParams(
        k, Fraction(eta).limit_denominator(10 ** 9), Fraction(kappa_cutoff).limit_denominator(10 ** 9),
        eps, Fraction(dk).limit_denominator(1 << 20),
        None if kmax is None else Fraction(kmax).limit_denominator(1 << 20),
    )
    n = coloring.n
    if n < 6:
        raise DomainError("the symmetric algorithm needs N >= 6")
    t = params.t
    if t < 1:
        raise DomainError(f"t = ceil(eta k) = {t}; override eta so that t >= 1")
    if partition is None:
        third = n // 3
        X = (1 << third) - 1
        Y = ((1 << (2 * third)) - 1) & ~X
        Z = coloring.full & ~X & ~Y
    else:
        X, Y, Z = partition
    st = SymmetricState([], [], X, Y, Z)
    sizes0 = (X.bit_count(), Y.bit_count(), Z.bit_count())
    records: list[SymmetricRecord] = []
    red, blue = coloring.red, coloring.blue
    eps_v = params.epsilon
    cutoff = params.kappa_cutoff
    failure = None
    stalled = False

    while True:
        if st.X.bit_count() <= 1 or len(st.A) >= t or len(st.B) >= t or not st.Y or not st.Z:
            break
        st.p_R = _density(red, st.X, st.Y)
        st.p_B = _density(blue, st.X, st.Z)
        aR = sym_alpha(st.p_R, eps_v, t)
        aB = sym_alpha(st.p_B, eps_v, t)
        w = refinement_witness(coloring, st.X, st.Y, st.Z, aR, aB, dk=params.dk, kmax=params.kappa_max)
        if isinstance(w, RefinementFailure):
            failure = w
            break
        v = w.vertex
        Yp = st.Y & red[v]
        Zp = st.Z & blue[v]
        xb, yb, zb = st.X.bit_count(), st.Y.bit_count(), st.Z.bit_count()
        pRb, pBb = st.p_R, st.p_B
        before = (st.X, st.Y, st.Z)
        if w.kappa >= cutoff:
            color = w.boosted_color or w.orientation
            if color is Color.RED:
                kind = "red-boost"
                st.X, st.Y = w.x_prime, Yp
                st.s_R += 1
                st.kappa_R.append(w.kappa)
            else:
                kind = "blue-boost"
                st.X, st.Z = w.x_prime, Zp
                st.s_B += 1
                st.kappa_B.append(w.kappa)
        else:
            rest = w.x_prime & ~(1 << v)
            reds = (red[v] & rest).bit_count()
            if reds >= math.ceil(Fraction(rest.bit_count(), 2)):
                kind = "red"
                st.A.append(v)
                st.X, st.Y = red[v] & rest, Yp
                st.t_red += 1
            else:
                kind = "blue"
                st.B.append(v)
                st.X, st.Z = blue[v] & rest, Zp
                st.t_blue += 1
        rec = SymmetricRecord(
            kind, v, w.kappa, w.x_prime_size, xb, st.X.bit_count(), yb, st.Y.bit_count(),
            zb, st.Z.bit_count(),
            p_R_before=pRb, p_R_after=_density(red, st.X, st.Y),
            p_B_before=pBb, p_B_after=_density(blue, st.X, st.Z),
            alpha_R=aR, alpha_B=aB, clause_a=w.clause_a,
            clause_b_red=w.clause_b_red, clause_b_blue=w.clause_b_blue,
            clause_c_color=None if w.boosted_color is None else w.boosted_color.value,
            orientation=w.orientation.value, mode=w.mode,
        )
        records.append(rec)
        if (st.X, st.Y, st.Z) == before:
            # a boost that changes nothing would repeat forever
            stalled = True
            break
        if check_invariants and not symmetric_books_hold(coloring, st):
            raise AssertionError(f"symmetric book invariant broken after step {len(records)}")

    if failure is not None:
        outcome, witness = "refinement_failure", None
    elif len(st.A) >= t:
        outcome, witness = "red_book", BookWitness(Color.RED, tuple(sorted(st.A)), tuple(members(st.Y)))
    elif len(st.B) >= t:
        outcome, witness = "blue_book", BookWitness(Color.BLUE, tuple(sorted(st.B)), tuple(members(st.Z)))
    elif stalled:
        outcome, witness = "stalled", None
    else:
        outcome, witness = "exhausted", None
    return SymmetricResult(outcome, witness, st, records, params, n, sizes0, failure)


# report -------------------------------------------------------------------


def constant_constraints(c: Fraction, C: int, eta: Fraction, kappa_cutoff: Fraction) -> dict[str, bool]:
    """The four constraints on (c, C, eta, kappa_cutoff) used by the analysis."""
    c, eta, kc = Fraction(c), Fraction(eta), Fraction(kappa_cutoff)
    log_inv_c = math.log2(1 / c)
    exact_log = Fraction(int(round(log_inv_c))) if 2 ** round(log_inv_c) == 1 / c else None
    lic = exact_log if exact_log is not None else Fraction(log_inv_c)
    return {
        "kappa_cutoff >= 8C": kc >= 8 * C,
        "kappa_cutoff^2 >= 8 log2(1/c)": kc * kc >= 8 * lic,
        "2(log2(1/c) + C kappa_cutoff) + 5 < 1/eta": 2 * (lic + C * kc) + 5 < 1 / eta,
        "kappa_cutoff^2 >= 20/eta": kc * kc >= 20 / eta,
    }


@dataclass
class SymmetricReport:
    constraints: dict
    t: int
    t_red: int = 0
    t_blue: int = 0
    s_R: int = 0
    s_B: int = 0
    kappa_R_mean: Optional[float] = None
    kappa_B_mean: Optional[float] = None
    zigzag_R: float = 0.0
    zigzag_B: float = 0.0
    kappa_contribution_R_ok: Optional[bool] = None
    kappa_contribution_B_ok: Optional[bool] = None
    x_bookkeeping_ok: Optional[bool] = None
    y_bookkeeping_ok: Optional[bool] = None
    z_bookkeeping_ok: Optional[bool] = None
    boost_x_factor_violations: int = 0
    step_x_factor_shortfalls: int = 0
    x_log2_final: Optional[float] = None
    x_log2_lemma: Optional[float] = None
    x_lemma_ok: Optional[bool] = None
    y_lemma_ok: Optional[bool] = None
    z_lemma_ok: Optional[bool] = None
    clause_b_pass_rate: Optional[float] = None
    clause_c_pass_rate: Optional[float] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        return d


def symmetric_trace_report(
    records: list[SymmetricRecord], params: SymmetricParams, sizes0: Optional[tuple[int, int, int]] = None
) -> SymmetricReport:
    c, C = Fraction(params.c), params.C
    kc = Fraction(params.kappa_cutoff)
    t = params.t
    rep = SymmetricReport(constant_constraints(c, C, params.eta, kc), t)
    if not records:
        return rep
    rep.t_red = sum(r.kind == "red" for r in records)
    rep.t_blue = sum(r.kind == "blue" for r in records)
    kR = [r.kappa for r in records if r.kind == "red-boost"]
    kB = [r.kappa for r in records if r.kind == "blue-boost"]
    rep.s_R, rep.s_B = len(kR), len(kB)
    if kR:
        rep.kappa_R_mean = float(sum(kR) / len(kR))
    if kB:
        rep.kappa_B_mean = float(sum(kB) / len(kB))
    rep.zigzag_R = float(sum(k * k - 1 for k in kR))
    rep.zigzag_B = float(sum(k * k - 1 for k in kB))
    if kc > 0:
        rep.kappa_contribution_R_ok = float(sum(kR)) <= 4 * t / float(kc)
        rep.kappa_contribution_B_ok = float(sum(kB)) <= 4 * t / float(kc)

    x0 = sizes0[0] if sizes0 else records[0].x_before
    y0 = sizes0[1] if sizes0 else records[0].y_before
    z0 = sizes0[2] if sizes0 else records[0].z_before
    fx = fy = fz = Fraction(1)
    for r in records:
        fx *= Fraction(r.x_after, r.x_before) if r.x_before else 1
        fy *= Fraction(r.y_after, r.y_before) if r.y_before else 1
        fz *= Fraction(r.z_after, r.z_before) if r.z_before else 1
        factor = Fraction(r.x_after, r.x_before)
        if r.kind.endswith("boost"):
            if not meets_geometric_bound(r.x_after, r.x_before, r.kappa, c, C):
                rep.boost_x_factor_violations += 1
        else:
            # red/blue step: x_after/x_before vs (1/2) c 2^{-C kappa}; the -1 for v may cost a little
            if not meets_geometric_bound(2 * r.x_after, r.x_before, r.kappa, c, C):
                rep.step_x_factor_shortfalls += 1
    last = records[-1]
    rep.x_bookkeeping_ok = fx * x0 == last.x_after
    rep.y_bookkeeping_ok = fy * y0 == last.y_after
    rep.z_bookkeeping_ok = fz * z0 == last.z_after

    # |X| >= (1/2 c 2^{-C kc})^{t_red + t_blue} c^{s_R+s_B} 2^{-C sum kappa} |X0|, in log2
    lc = math.log2(float(c))
    steps = rep.t_red + rep.t_blue
    lemma = steps * (lc - 1 - C * float(kc)) + (rep.s_R + rep.s_B) * lc - C * float(sum(kR) + sum(kB)) + math.log2(x0)
    rep.x_log2_lemma = lemma
    rep.x_log2_final = math.log2(last.x_after) if last.x_after else -math.inf
    rep.x_lemma_ok = rep.x_log2_final >= lemma
    eps = params.epsilon
    rep.y_lemma_ok = last.y_after >= max(0.5 - eps, 0) ** (rep.t_red + rep.s_R) * y0
    rep.z_lemma_ok = last.z_after >= max(0.5 - eps, 0) ** (rep.t_blue + rep.s_B) * z0
    b_checks = [r.clause_b_red and r.clause_b_blue for r in records]
    rep.clause_b_pass_rate = sum(bool(x) for x in b_checks) / len(records)
    rep.clause_c_pass_rate = sum(r.clause_c_color is not None for r in records) / len(records)
    return rep
