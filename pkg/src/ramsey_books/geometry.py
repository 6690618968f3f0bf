"""Inner-product geometry behind the refinement step.

* sigma embeddings: centred, rescaled neighbourhood indicators whose inner
  products encode common-neighbourhood sizes;
* the two-color geometric witness (probability >= c 2^{-C kappa}) and the
  one-color witness (probability >= 1/(kappa^2+2)^2), found by exact pair
  counting over all |X|^2 ordered pairs;
* the analytic function f(y, z) = 1 + y(2 + cosh sqrt(2z)) + z(2 + cosh sqrt(2y))
  and its Taylor coefficients;
* moments E[<s_Y, s_Y'>^a <s_Z, s_Z'>^b] for i.i.d. pairs, exactly on finite
  support or by Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .coloring import Color, EdgeColoring, members, vset
from .rng import XorShiftRNG

C_SMALL = Fraction(1, 8)  # c
C_EXP = 6  # C


# exact bound helpers -------------------------------------------------------


def meets_geometric_bound(count: int, total: int, kappa: Fraction, c: Fraction = C_SMALL, C: int = C_EXP) -> bool:
    """Exact test of count/total >= c 2^{-C kappa} for rational kappa >= 0.

    With C kappa = num/den this is (count/(c total))^den * 2^num >= 1, an
    integer inequality.
    """
    kappa = Fraction(kappa)
    e = C * kappa
    num, den = e.numerator, e.denominator
    lhs = Fraction(count, 1) / (c * total)
    # compare lhs^den * 2^num >= 1 with integers
    a, b = lhs.numerator, lhs.denominator
    if num >= 0:
        return a ** den * 2 ** num >= b ** den
    return a ** den >= b ** den * 2 ** (-num)


def meets_one_color_bound(count: int, total: int, kappa: Fraction) -> bool:
    """Exact test of count/total >= 1/(kappa^2 + 2)^2."""
    kappa = Fraction(kappa)
    return count * (kappa * kappa + 2) ** 2 >= total


def kappa_grid(dk: Fraction, kmax: Fraction) -> list[Fraction]:
    dk = Fraction(dk)
    steps = int(Fraction(kmax) / dk)
    return [dk * j for j in range(steps + 1)]


# sigma embeddings ---------------------------------------------------------


@dataclass
class SigmaEmbedding:
    """sigma(v) = (1(v) - p 1) / sqrt(alpha p |T|) over the coordinates of T."""

    coloring: EdgeColoring
    X: int
    T: int
    color: Color
    p: Fraction
    alpha: float

    def __post_init__(self):
        self._cols = members(self.T)
        self._scale = math.sqrt(self.alpha * float(self.p) * len(self._cols))
        self._cache: dict[int, np.ndarray] = {}

    def indicator(self, v: int) -> np.ndarray:
        nb = self.coloring.adjacency(self.color)[v]
        return np.array([(nb >> y) & 1 for y in self._cols], dtype=np.int64)

    def vector(self, v: int) -> np.ndarray:
        if v not in self._cache:
            self._cache[v] = (self.indicator(v) - float(self.p)) / self._scale
        return self._cache[v]

    def matrix(self) -> np.ndarray:
        return np.array([self.vector(v) for v in members(self.X)]).reshape(self.X.bit_count(), len(self._cols))


def sigma_embedding(
    coloring: EdgeColoring, X, T, color: "Color | str", alpha: float, p: Optional[Fraction] = None
) -> SigmaEmbedding:
    from .coloring import density

    X, T = vset(X), vset(T)
    color = Color.parse(color)
    if p is None:
        p = density(coloring, color, X, T)
    return SigmaEmbedding(coloring, X, T, color, p, alpha)


def inner_product_identity_check(coloring: EdgeColoring, X, Y, v: int, w: int, color: "Color | str" = Color.RED) -> tuple[int, int]:
    """(<1_Y(v), 1_Y(w)>, |N_Y(v) & N_Y(w)|) computed independently."""
    X, Y = vset(X), vset(Y)
    if not (X >> v) & 1 or not (X >> w) & 1:
        raise ValueError("v and w must lie in X")
    emb = SigmaEmbedding(coloring, X, Y, Color.parse(color), Fraction(1, 2), 1.0)
    dot = int(emb.indicator(v) @ emb.indicator(w))
    adj = coloring.adjacency(color)
    return dot, (adj[v] & adj[w] & Y).bit_count()


# witnesses ---------------------------------------------------------------


@dataclass(frozen=True)
class GeometricWitness:
    kappa: Fraction
    orientation: str  # "YZ": <s_Y,s_Y'> >= kappa^2-1 and <s_Z,s_Z'> >= -1 ; "ZY" swapped
    probability: float
    count: int
    total: int
    mode: str  # "grid" or "breakpoint"


def _gram(vectors) -> np.ndarray:
    a = np.asarray(vectors, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    return a @ a.T


def _least_breakpoint(values: np.ndarray, total: int, need_kappa) -> Optional[Fraction]:
    """Exact least kappa when the grid misses.

    ``values`` are the eligible pair inner products; for the j-th largest
    value g_j, kappa works with count >= j iff kappa^2 - 1 <= g_j and
    kappa >= need_kappa(j).  Returns a rational kappa (rounded up on a 2^-30
    lattice) that satisfies both, or None.
    """
    g = np.sort(values)[::-1]
    best = None
    for j, gj in enumerate(g, start=1):
        if gj < -1:
            break
        lo = need_kappa(j)
        hi = math.sqrt(gj + 1)
        if lo <= hi:
            cand = Fraction(math.ceil(lo * 2 ** 30), 2 ** 30)
            if cand * cand - 1 <= gj and (best is None or cand < best):
                best = cand
    return best


def geometric_witness(
    sigma_Y, sigma_Z, dk: "float | Fraction" = Fraction(1, 4), kmax: "float | Fraction" = 1200,
    max_halvings: int = 4,
) -> GeometricWitness:
    """Least kappa (then orientation YZ before ZY) with probability >= c 2^{-C kappa}."""
    GY, GZ = _gram(sigma_Y), _gram(sigma_Z)
    n = GY.shape[0]
    total = n * n
    dk = Fraction(dk).limit_denominator(1 << 20)
    kmax = Fraction(kmax).limit_denominator(1 << 20)
    eligible = {"YZ": GY[GZ >= -1].ravel(), "ZY": GZ[GY >= -1].ravel()}
    sorted_vals = {o: np.sort(vals) for o, vals in eligible.items()}
    for _ in range(max_halvings + 1):
        for kappa in kappa_grid(dk, kmax):
            thr = float(kappa * kappa - 1)
            for orient in ("YZ", "ZY"):
                vals = sorted_vals[orient]
                count = int(vals.size - np.searchsorted(vals, thr, side="left"))
                if count and meets_geometric_bound(count, total, kappa):
                    return GeometricWitness(kappa, orient, count / total, count, total, "grid")
        dk /= 2
    best = None
    for orient in ("YZ", "ZY"):
        k = _least_breakpoint(eligible[orient], total, lambda j: max(0.0, math.log2(total / (8 * j)) / C_EXP))
        if k is not None and (best is None or k < best[0]):
            vals = sorted_vals[orient]
            count = int(vals.size - np.searchsorted(vals, float(k * k - 1), side="left"))
            best = (k, orient, count)
    if best is None:
        raise RuntimeError("no geometric witness found; this contradicts the geometric lemma")
    k, orient, count = best
    return GeometricWitness(k, orient, count / total, count, total, "breakpoint")


@dataclass(frozen=True)
class OneColorWitness:
    kappa: Fraction
    probability: float
    count: int
    total: int
    mode: str


def one_color_witness(
    sigma, dk: "float | Fraction" = Fraction(1, 4), kmax: "float | Fraction" = 100, max_halvings: int = 4
) -> OneColorWitness:
    """Least kappa on the grid with Pr(<s(v), s(w)> >= kappa^2 - 1) >= 1/(kappa^2+2)^2."""
    G = _gram(sigma)
    n = G.shape[0]
    total = n * n
    vals = np.sort(G.ravel())
    dk = Fraction(dk).limit_denominator(1 << 20)
    kmax = Fraction(kmax).limit_denominator(1 << 20)
    for _ in range(max_halvings + 1):
        for kappa in kappa_grid(dk, kmax):
            count = int(vals.size - np.searchsorted(vals, float(kappa * kappa - 1), side="left"))
            if count and meets_one_color_bound(count, total, kappa):
                return OneColorWitness(kappa, count / total, count, total, "grid")
        dk /= 2
    k = _least_breakpoint(G.ravel(), total, lambda j: math.sqrt(max(0.0, n / math.sqrt(j) - 2)))
    if k is None:
        raise RuntimeError("no one-color witness found; this contradicts the one-color bound")
    count = int(vals.size - np.searchsorted(vals, float(k * k - 1), side="left"))
    return OneColorWitness(k, count / total, count, total, "breakpoint")


def random_family(rng: XorShiftRNG, n: int, dim: int, scale: float) -> np.ndarray:
    """n vectors in R^dim with i.i.d. centred uniform entries in [-scale, scale]."""
    out = np.empty((n, dim))
    for i in range(n):
        for j in range(dim):
            out[i, j] = (2.0 * rng.random() - 1.0) * scale
    return out


# the function f -----------------------------------------------------------


def cosh_sqrt2(u: float) -> float:
    """cosh(sqrt(2u)) as an entire function of u (cos(sqrt(-2u)) for u < 0)."""
    if u >= 0:
        return math.cosh(math.sqrt(2.0 * u))
    return math.cos(math.sqrt(-2.0 * u))


def f_eval(y: float, z: float) -> float:
    return 1.0 + y * (2.0 + cosh_sqrt2(z)) + z * (2.0 + cosh_sqrt2(y))


def f_upper(y: float, z: float) -> float:
    return math.exp(3.0 * math.sqrt(max(y, z) + 1.0))


def f_taylor(total_degree: int) -> dict[tuple[int, int], Fraction]:
    """Exact Taylor coefficients r_{a,b} of f for a + b <= total_degree.

    cosh sqrt(2u) = sum_m 2^m u^m / (2m)!, so f = 1 + 3y + 3z
    + sum_{m>=1} 2^m/(2m)! (y z^m + z y^m).
    """
    coeffs: dict[tuple[int, int], Fraction] = {}
    for a in range(total_degree + 1):
        for b in range(total_degree + 1 - a):
            coeffs[(a, b)] = Fraction(0)
    coeffs[(0, 0)] += 1
    if total_degree >= 1:
        coeffs[(1, 0)] += 3
        coeffs[(0, 1)] += 3
    for m in range(1, total_degree):
        term = Fraction(2 ** m, math.factorial(2 * m))
        coeffs[(1, m)] += term
        coeffs[(m, 1)] += term
    return coeffs


def f_series(y: float, z: float, total_degree: int = 30) -> float:
    return float(sum(float(r) * y ** a * z ** b for (a, b), r in f_taylor(total_degree).items() if r))


# moments ------------------------------------------------------------------


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    std_error: float
    exact: Optional[Fraction] = None


def _to_fraction_vec(v) -> list[Fraction]:
    return [Fraction(float(x)) if not isinstance(x, Fraction) else x for x in np.ravel(v)]


def moment_estimate(
    support: Sequence[tuple], a: int, b: int, n_samples: int = 0, seed: int = 0,
    weights: Optional[Sequence] = None,
) -> MomentEstimate:
    """E[<s_Y, s_Y'>^a <s_Z, s_Z'>^b] for two independent draws of (s_Y, s_Z).

    ``support`` lists the (s_Y, s_Z) pairs of a finite distribution (uniform
    unless ``weights`` are given).  With ``n_samples == 0`` the expectation is
    summed exactly over all ordered support pairs in rational arithmetic (every
    float is converted exactly); otherwise it is estimated by Monte Carlo with
    a standard error.
    """
    if a < 0 or b < 0:
        raise ValueError("a and b must be non-negative")
    m = len(support)
    if weights is None:
        w = [Fraction(1, m)] * m
    else:
        w = [Fraction(x) for x in weights]
        s = sum(w)
        w = [x / s for x in w]
    if n_samples == 0:
        ys = [_to_fraction_vec(p[0]) for p in support]
        zs = [_to_fraction_vec(p[1]) for p in support]
        total = Fraction(0)
        for i in range(m):
            for j in range(m):
                iy = sum(p * q for p, q in zip(ys[i], ys[j]))
                iz = sum(p * q for p, q in zip(zs[i], zs[j]))
                total += w[i] * w[j] * iy ** a * iz ** b
        return MomentEstimate(float(total), 0.0, total)
    rng = XorShiftRNG(seed)
    cum = np.cumsum([float(x) for x in w])

    def draw() -> int:
        return int(min(np.searchsorted(cum, rng.random(), side="right"), m - 1))

    samples = np.empty(n_samples)
    for i in range(n_samples):
        p, q = support[draw()], support[draw()]
        samples[i] = float(np.dot(p[0], q[0])) ** a * float(np.dot(p[1], q[1])) ** b
    se = float(samples.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return MomentEstimate(float(samples.mean()), se)


def mean_inner_identity(vectors: Sequence) -> tuple[Fraction, Fraction]:
    """(E<s, s'>, ||E s||^2) for i.i.d. uniform draws from a finite list; the two agree."""
    vs = [_to_fraction_vec(v) for v in vectors]
    m = len(vs)
    lhs = sum(sum(p * q for p, q in zip(vs[i], vs[j])) for i in range(m) for j in range(m)) / (m * m)
    mean = [sum(col) / m for col in zip(*vs)]
    rhs = sum(x * x for x in mean)
    return lhs, rhs
