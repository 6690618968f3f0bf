"""Scalar fields on the unit square and rigorous per-rectangle upper bounds.

Coordinates are x = t/k (red steps) and y = s/k (density-boost steps).  All
evaluators accept numpy arrays and use the continuous extensions
y log2((x+y)/y) -> 0 as y -> 0 and z log2 z -> 0 as z -> 0.

Every field is a sum of one-variable-monotone terms, which gives the cell
bound used by the certifier: on [x0,x1] x [y0,y1] each term is replaced by its
value at the worst corner.  The monotone pieces are

* phi(x, y) = y log2(1 + x/y), increasing in x and in y;
* h(x) = (2-x) H((1-x)/(2-x)) = (2-x) log2(2-x) - (1-x) log2(1-x), decreasing;
* psi_lam(x) = s H(lam/s) with s = 1 - x + lam, decreasing in x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

LN2 = math.log(2.0)
THREE_QUARTERS = 0.75
DELTA_HAT = 2.0 / 9.0


def _xlog2x(z):
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(z > 0, z * np.log2(np.where(z > 0, z, 1.0)), 0.0)
    return out


def entropy(z):
    """Binary entropy H(z) = -z log2 z - (1-z) log2(1-z), with H(0) = H(1) = 0."""
    arr = np.asarray(z, dtype=float)
    if np.any((arr < 0) | (arr > 1)) or np.any(np.isnan(arr)):
        raise ValueError("entropy argument must lie in [0, 1]")
    out = -_xlog2x(arr) - _xlog2x(1.0 - arr)
    return float(out) if np.ndim(out) == 0 else out


def phi(x, y):
    """y log2((x+y)/y), continuously extended by 0 on y = 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        safe = np.where(y > 0, y, 1.0)
        out = np.where(y > 0, y * np.log2((x + safe) / safe), 0.0)
    return out


def h_term(x):
    """(2-x) H((1-x)/(2-x)) written without the inner division."""
    x = np.asarray(x, dtype=float)
    return _xlog2x(2.0 - x) - _xlog2x(1.0 - x)


def psi_term(x, lam: float):
    """s H(lam/s) with s = 1 - x + lam, i.e. s log2 s - lam log2 lam - (s-lam) log2(s-lam)."""
    x = np.asarray(x, dtype=float)
    s = 1.0 - x + lam
    return _xlog2x(s) - _xlog2x(np.full_like(s, lam)) - _xlog2x(s - lam)


# fields -----------------------------------------------------------------------


@dataclass(frozen=True)
class Field:
    """A named scalar field; ``mu`` parameterises the G_mu / tilde families."""

    name: str  # G | F | G_mu | F_tilde | G_tilde | F_hat | min_of
    mu: Optional[Fraction] = None
    parts: tuple = ()

    def __post_init__(self):
        if self.name == "min_of":
            if not self.parts:
                raise ValueError("min needs at least one field")
        elif self.name in ("G", "F", "F_hat"):
            if self.mu is not None:
                raise ValueError(f"{self.name} takes no mu")
        elif self.name in ("G_mu", "F_tilde", "G_tilde"):
            if self.mu is None or not 0 < self.mu < 1:
                raise ValueError(f"{self.name} needs mu in (0, 1)")
        else:
            raise ValueError(f"unknown field {self.name!r}")

    # construction helpers
    @classmethod
    def parse(cls, text: str) -> "Field":
        """Parse e.g. ``G``, ``F``, ``F_hat``, ``G_mu:2/5``, ``min:F,G_mu:2/5``."""
        text = text.strip()
        if text.startswith("min:") or text.startswith("min("):
            body = text[4:].rstrip(")")
            return cls("min_of", None, tuple(cls.parse(p) for p in _split_top(body)))
        if ":" in text:
            name, mu = text.split(":", 1)
            return cls(name, Fraction(mu))
        return cls(text)

    @property
    def label(self) -> str:
        if self.name == "min_of":
            return "min(" + ",".join(p.label for p in self.parts) + ")"
        if self.mu is not None:
            return f"{self.name}[mu={self.mu}]"
        return self.name

    def spec(self) -> str:
        if self.name == "min_of":
            return "min:" + ",".join(p.spec() for p in self.parts)
        return self.name if self.mu is None else f"{self.name}:{self.mu}"

    def _consts(self):
        mu = float(self.mu)
        lam = mu / (1.0 - mu)
        return math.log2(1.0 / (1.0 - mu)), math.log2(1.0 / mu), lam

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        n = self.name
        if n == "G":
            out = (x - y) + phi(x, y)
        elif n == "F":
            out = -1.0 + x + y + h_term(x)
        elif n == "F_hat":
            out = -1.0 + x + y + h_term(x) - DELTA_HAT * (1.0 - x) * (x >= THREE_QUARTERS)
        elif n == "G_mu":
            a, b, _ = self._consts()
            out = -1.0 + x * a + (1.0 - y) * b + phi(x, y)
        elif n == "G_tilde":
            a, b, lam = self._consts()
            out = -1.0 + x * a + (lam - y) * b + phi(x, y)
        elif n == "F_tilde":
            a, _, lam = self._consts()
            out = -1.0 + (x + y) * a + psi_term(x, lam)
        elif n == "min_of":
            out = np.minimum.reduce([np.broadcast_to(p(x, y), np.broadcast(x, y).shape) for p in self.parts])
        else:
            raise ValueError(f"unknown field {n!r}")
        return float(out) if np.ndim(out) == 0 else out

    def upper(self, x0, x1, y0, y1):
        """Rigorous (up to rounding) upper bound of the field on each cell."""
        x0, x1, y0, y1 = (np.asarray(v, dtype=float) for v in (x0, x1, y0, y1))
        n = self.name
        if n == "G":
            out = (x1 - y0) + phi(x1, y1)
        elif n == "F":
            out = -1.0 + x1 + y1 + h_term(x0)
        elif n == "F_hat":
            base = -1.0 + x1 + y1 + h_term(x0)
            # the penalty is only certain when the whole cell has x >= 3/4
            out = base - DELTA_HAT * (1.0 - x1) * (x0 >= THREE_QUARTERS)
        elif n == "G_mu":
            a, b, _ = self._consts()
            out = -1.0 + x1 * a + (1.0 - y0) * b + phi(x1, y1)
        elif n == "G_tilde":
            a, b, lam = self._consts()
            out = -1.0 + x1 * a + (lam - y0) * b + phi(x1, y1)
        elif n == "F_tilde":
            a, _, lam = self._consts()
            out = -1.0 + (x1 + y1) * a + psi_term(x0, lam)
        elif n == "min_of":
            out = np.minimum.reduce([np.broadcast_to(p.upper(x0, x1, y0, y1), x0.shape) for p in self.parts])
        else:
            raise ValueError(f"unknown field {n!r}")
        return out


def _split_top(body: str) -> list[str]:
    # fields never nest parentheses beyond one level; split on commas
    return [p for p in body.split(",") if p]


def field_eval(field: "Field | str", x: float, y: float) -> float:
    if isinstance(field, str):
        field = Field.parse(field)
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError("field arguments must lie in [0, 1]^2")
    return float(field(x, y))


def offdiag_rhs(mu: float, delta: float) -> float:
    """(1 + lam) H(mu) - 1 - delta lam with lam = mu/(1-mu)."""
    lam = mu / (1.0 - mu)
    return (1.0 + lam) * entropy(mu) - 1.0 - delta * lam


# the one-variable Taylor inequality -------------------------------------------


def taylor_lhs(x):
    """(x + x^2/4) + (2-x) H(1/(2-x))."""
    x = np.asarray(x, dtype=float)
    return x + x * x / 4.0 + h_term(x)


def taylor_difference(x):
    """D(x) = lhs - (2 - x^2/10); the claim is D <= 0 on [0, 1]."""
    x = np.asarray(x, dtype=float)
    return taylor_lhs(x) - (2.0 - x * x / 10.0)


def taylor_coefficients(degree: int) -> list[float]:
    """Closed-form power-series coefficients c_0..c_degree of D.

    (2-x) log2(2-x) - (1-x) log2(1-x) = 2 - x + sum_{n>=2} (2^{1-n} - 1) x^n / (n (n-1) ln 2),
    so c_0 = c_1 = 0, c_2 = 7/20 - 1/(4 ln 2) and c_n = (2^{1-n} - 1)/(n (n-1) ln 2) for n >= 3.
    """
    out = [0.0] * (degree + 1)
    for n in range(2, degree + 1):
        out[n] = (2.0 ** (1 - n) - 1.0) / (n * (n - 1) * LN2)
    if degree >= 2:
        out[2] += 0.35
    return out


def taylor_coefficients_numeric(degree: int, radius: float = 0.5, points: int = 256) -> list[float]:
    """Coefficients of D from a discrete Cauchy integral (independent of the closed form)."""
    k = np.arange(points)
    z = radius * np.exp(2j * np.pi * k / points)
    vals = z + z * z / 4.0 + ((2 - z) * np.log(2 - z) - (1 - z) * np.log(1 - z)) / LN2 - 2.0 + z * z / 10.0
    coeffs = np.fft.fft(vals) / points
    return [float((coeffs[n] / radius ** n).real) for n in range(degree + 1)]
