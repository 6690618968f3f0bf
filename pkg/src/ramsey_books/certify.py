"""Certified global maximisation of the inequality fields.

:func:`certify_max` is a breadth-first quadtree branch-and-bound.  Every cell
carries a rigorous upper bound (:meth:`Field.upper` plus a rounding slack
``RHO``); the lower bound is the best field value seen at a cell centre.  A
cell is *closed* once its bound is within ``tol`` of the best lower bound, so
on termination

    lower <= true max <= upper = max(closed cell bounds),   upper - lower <= tol.

The closed cells form the certificate.  :func:`check_certificate` replays it
without trusting the search: it checks that the cells tile the region (dyadic
quadtree cells, pairwise non-nested, areas summing to the region's area) and
recomputes every bound.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .fields import (
    Field,
    h_term,
    offdiag_rhs,
    taylor_coefficients,
    taylor_coefficients_numeric,
    taylor_difference,
)

RHO = 1e-12
UNIT = (0.0, 1.0, 0.0, 1.0)
INITIAL_SPLITS = 4  # the search starts from a 16 x 16 grid


def default_tol() -> float:
    return float(os.environ.get("RAMSEY_TOL", "1e-4"))


def default_budget() -> int:
    return int(os.environ.get("RAMSEY_CELL_BUDGET", "4000000"))


@dataclass
class CertifiedBound:
    field: str
    label: str
    region: tuple
    lower: float
    upper: float
    argmax: tuple
    cells: int
    evaluated: int
    wall_time: float
    status: str  # certified | budget_exceeded
    tol: float
    certificate: Optional[np.ndarray] = dc_field(default=None, repr=False)

    @property
    def certified_max(self) -> float:
        return (self.lower + self.upper) / 2

    @property
    def error_radius(self) -> float:
        return (self.upper - self.lower) / 2

    @property
    def ok(self) -> bool:
        return self.status == "certified"

    def summary(self) -> dict:
        d = asdict(self)
        d.pop("certificate")
        d["certified_max"] = self.certified_max
        d["error_radius"] = self.error_radius
        return d

    def certificate_dict(self) -> dict:
        """Deterministic certificate (no wall time)."""
        cells = self.certificate if self.certificate is not None else np.zeros((0, 5))
        return {
            "field": self.field,
            "label": self.label,
            "region": list(self.region),
            "tol": self.tol,
            "rho": RHO,
            "bound": "monotone-corner",
            "status": self.status,
            "lower": self.lower,
            "upper": self.upper,
            "argmax": list(self.argmax),
            "cells": [[float(v) for v in row] for row in cells],
        }

    def write_certificate(self, path: "str | Path") -> None:
        Path(path).write_text(json.dumps(self.certificate_dict(), separators=(",", ":")) + "\n")


def _as_field(f: "Field | str") -> Field:
    return Field.parse(f) if isinstance(f, str) else f


def _initial_cells(region) -> tuple[np.ndarray, ...]:
    a, b, c, d = region
    m = 1 << INITIAL_SPLITS
    xs = np.linspace(a, b, m + 1)
    ys = np.linspace(c, d, m + 1)
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    i, j = i.ravel(), j.ravel()
    return xs[i], xs[i + 1], ys[j], ys[j + 1]


def certify_max(
    field: "Field | str",
    region: Sequence[float] = UNIT,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
) -> CertifiedBound:
    """Certify the maximum of ``field`` over the rectangle ``region`` = (x0, x1, y0, y1)."""
    f = _as_field(field)
    tol = default_tol() if tol is None else float(tol)
    budget = default_budget() if budget is None else int(budget)
    if not tol > 0:
        raise ValueError("tol must be positive")
    region = tuple(float(v) for v in region)
    a, b, c, d = region
    if not (0.0 <= a < b <= 1.0 and 0.0 <= c < d <= 1.0):
        raise ValueError("region must be a non-degenerate sub-rectangle of [0,1]^2")

    start = time.perf_counter()
    x0, x1, y0, y1 = _initial_cells(region)
    closed: list[np.ndarray] = []
    best = -math.inf
    arg = (math.nan, math.nan)
    evaluated = 0
    status = "certified"
    while x0.size:
        evaluated += x0.size
        ub = f.upper(x0, x1, y0, y1) + RHO
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        vals = f(cx, cy)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best = float(vals[i])
            arg = (float(cx[i]), float(cy[i]))
        done = ub <= best + tol
        closed.append(np.column_stack([x0[done], x1[done], y0[done], y1[done], ub[done]]))
        open_ = ~done
        if evaluated + 4 * int(open_.sum()) > budget:
            closed.append(np.column_stack([x0[open_], x1[open_], y0[open_], y1[open_], ub[open_]]))
            status = "budget_exceeded"
            break
        x0, x1, y0, y1 = x0[open_], x1[open_], y0[open_], y1[open_]
        xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
        x0, x1, y0, y1 = (
            np.concatenate([x0, x0, xm, xm]),
            np.concatenate([xm, xm, x1, x1]),
            np.concatenate([y0, ym, y0, ym]),
            np.concatenate([ym, y1, ym, y1]),
        )
    cells = np.concatenate(closed) if closed else np.zeros((0, 5))
    order = np.lexsort((cells[:, 2], cells[:, 0]))
    cells = cells[order]
    upper = float(cells[:, 4].max())
    return CertifiedBound(
        field=f.spec(),
        label=f.label,
        region=region,
        lower=best,
        upper=upper,
        argmax=arg,
        cells=int(cells.shape[0]),
        evaluated=evaluated,
        wall_time=time.perf_counter() - start,
        status=status,
        tol=tol,
        certificate=cells,
    )


# replay ----------------------------------------------------------------------


@dataclass
class ReplayReport:
    tiles_region: bool
    bounds_reproduced: bool
    bounds_dominate_samples: bool
    upper_consistent: bool
    lower_witnessed: bool
    problems: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.tiles_region
            and self.bounds_reproduced
            and self.bounds_dominate_samples
            and self.upper_consistent
            and self.lower_witnessed
        )


def _tiles(cells: np.ndarray, region) -> tuple[bool, list]:
    a, b, c, d = (Fraction(v) for v in region)
    w, h = b - a, d - c
    seen: set = set()
    keys = []
    area = Fraction(0)
    for x0, x1, y0, y1, _ in cells:
        fx0, fx1, fy0, fy1 = (Fraction(float(v)) for v in (x0, x1, y0, y1))
        cw, ch = fx1 - fx0, fy1 - fy0
        if cw <= 0 or ch <= 0 or fx0 < a or fx1 > b or fy0 < c or fy1 > d:
            return False, [f"cell outside region: {(x0, x1, y0, y1)}"]
        ratio = w / cw
        if ratio != h / ch or ratio.denominator != 1 or ratio.numerator & (ratio.numerator - 1):
            return False, [f"cell is not a quadtree cell: {(x0, x1, y0, y1)}"]
        level = ratio.numerator.bit_length() - 1
        i, j = (fx0 - a) / cw, (fy0 - c) / ch
        if i.denominator != 1 or j.denominator != 1:
            return False, [f"misaligned cell: {(x0, x1, y0, y1)}"]
        key = (level, int(i), int(j))
        if key in seen:
            return False, [f"duplicate cell {key}"]
        seen.add(key)
        keys.append(key)
        area += cw * ch
    if area != w * h:
        return False, [f"cell areas sum to {area}, region area {w * h}"]
    for level, i, j in keys:
        for up in range(1, level + 1):
            if (level - up, i >> up, j >> up) in seen:
                return False, [f"nested cells at {(level, i, j)}"]
    return True, []


def check_certificate(cert: "dict | str | Path") -> ReplayReport:
    """Independently re-verify a certificate produced by :func:`certify_max`."""
    if not isinstance(cert, dict):
        cert = json.loads(Path(cert).read_text())
    f = Field.parse(cert["field"])
    cells = np.asarray(cert["cells"], dtype=float).reshape(-1, 5)
    region = tuple(cert["region"])
    problems: list = []
    tiles, msgs = _tiles(cells, region)
    problems += msgs
    x0, x1, y0, y1, bound = cells.T
    recomputed = f.upper(x0, x1, y0, y1) + float(cert.get("rho", RHO))
    reproduced = bool(np.all(recomputed <= bound))
    if not reproduced:
        problems.append("a recorded bound is below its recomputed value")
    dominate = True
    for px, py in ((x0, y0), (x0, y1), (x1, y0), (x1, y1), ((x0 + x1) / 2, (y0 + y1) / 2)):
        if np.any(f(px, py) > bound):
            dominate = False
    if not dominate:
        problems.append("a sampled field value exceeds its cell bound")
    upper_ok = bool(cells.size) and float(bound.max()) <= cert["upper"]
    ax, ay = cert["argmax"]
    lower_ok = bool(f(ax, ay) >= cert["lower"])
    return ReplayReport(tiles, reproduced, dominate, upper_ok, lower_ok, problems)


# off-diagonal inequality -----------------------------------------------------


OFFDIAG_MUS = (Fraction(1, 100), Fraction(1, 20), Fraction(1, 10), Fraction(1, 5))
OFFDIAG_DELTA = Fraction(2, 9)


@dataclass
class OffdiagRow:
    mu: str
    lam: float
    rhs: float
    sup_upper: float
    sup_lower: float
    argmax: tuple
    margin: float  # rhs - certified upper bound
    normalized_margin: float  # margin / lam
    holds: bool
    status: str


@dataclass
class OffdiagReport:
    delta: str
    rows: list

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.rows)

    @property
    def worst_mu(self) -> str:
        return min(self.rows, key=lambda r: r.margin).mu

    @property
    def worst_mu_normalized(self) -> str:
        return min(self.rows, key=lambda r: r.normalized_margin).mu

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "all_hold": self.all_hold,
            "worst_mu": self.worst_mu,
            "worst_mu_normalized": self.worst_mu_normalized,
            "rows": [asdict(r) for r in self.rows],
        }


def verify_offdiag_inequality(
    mus: Sequence["Fraction | float | str"] = OFFDIAG_MUS,
    delta: "Fraction | float | str" = OFFDIAG_DELTA,
    tol: Optional[float] = None,
) -> OffdiagReport:
    """Certify sup min{F~_mu, G~_mu} < (1+lam)H(mu) - 1 - delta*lam for each mu."""
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    rows = []
    for mu in mus:
        mu = Fraction(mu)
        if not 0 < mu <= Fraction(1, 5):
            raise ValueError("mu must lie in (0, 1/5]")
        f = Field("min_of", None, (Field("F_tilde", mu), Field("G_tilde", mu)))
        cb = certify_max(f, tol=tol)
        lam = float(mu / (1 - mu))
        rhs = offdiag_rhs(float(mu), float(delta))
        margin = rhs - cb.upper
        rows.append(
            OffdiagRow(
                mu=str(mu), lam=lam, rhs=rhs, sup_upper=cb.upper, sup_lower=cb.lower,
                argmax=cb.argmax, margin=margin, normalized_margin=margin / lam,
                holds=cb.ok and margin > 0, status=cb.status,
            )
        )
    return OffdiagReport(str(delta), rows)


# the Taylor inequality -------------------------------------------------------


@dataclass
class TaylorReport:
    series_cutoff: float
    interval_max_upper: float
    cells: int
    coefficients: list
    numeric_coefficients: list
    coefficients_nonpositive: bool
    holds: bool
    endpoint_values: tuple

    def to_dict(self) -> dict:
        return asdict(self)


def _taylor_upper(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # D = x + 0.35 x^2 - 2 + h(x) with h decreasing
    return b + 0.35 * b * b - 2.0 + h_term(a) + RHO


def verify_taylor_inequality(
    tol: float = 1e-6, degree: int = 12, series_cutoff: float = 0.0625, max_cells: int = 10**7
) -> TaylorReport:
    """Certify (x + x^2/4) + (2-x)H(1/(2-x)) <= 2 - x^2/10 on [0, 1].

    On [0, series_cutoff] the difference equals its power series, whose
    coefficients are non-positive in closed form (2^{1-n} - 1 < 0 for n >= 3
    and 7/20 < 1/(4 ln 2) for n = 2).  On [series_cutoff, 1] cells are bisected
    until every monotone upper bound is strictly negative; a cell narrower
    than ``tol`` that still fails makes the certification fail.
    """
    coeffs = taylor_coefficients(degree)
    numeric = taylor_coefficients_numeric(degree)
    nonpos = all(cf <= 0 for cf in coeffs)
    # subdivision on [series_cutoff, 1]
    a = np.linspace(series_cutoff, 1.0, 65)[:-1]
    b = a + (1.0 - series_cutoff) / 64
    worst = -math.inf
    count = 0
    ok = True
    while a.size:
        ub = _taylor_upper(a, b)
        good = ub < 0
        if good.any():
            worst = max(worst, float(ub[good].max()))
        count += int(good.sum())
        bad = ~good
        if not bad.any():
            break
        if np.any((b - a)[bad] < tol) or count > max_cells:
            ok = False
            worst = max(worst, float(ub[bad].max()))
            break
        a, b = a[bad], b[bad]
        m = (a + b) / 2
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
    holds = ok and nonpos and worst < 0
    ends = (float(taylor_difference(0.0)), float(taylor_difference(1.0)))
    return TaylorReport(series_cutoff, worst, count, coeffs, numeric, nonpos, holds, ends)


# contour grids -----------------------------------------------------------------


def contour_grid(field: "Field | str", resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    f = _as_field(field)
    g = np.linspace(0.0, 1.0, resolution)
    X, Y = np.meshgrid(g, g, indexing="ij")
    return X, Y, np.asarray(f(X, Y), dtype=float)


def emit_contour(field: "Field | str", resolution: int, threshold: Optional[float] = None) -> str:
    """CSV text with header ``x,y,value``; indicator mode writes 1{field > threshold}."""
    X, Y, V = contour_grid(field, resolution)
    if threshold is not None:
        V = (V > threshold).astype(int)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "value"])
    for x, y, v in zip(X.ravel(), Y.ravel(), V.ravel()):
        w.writerow([repr(float(x)), repr(float(y)), int(v) if threshold is not None else repr(float(v))])
    return buf.getvalue()


# claim registry ----------------------------------------------------------------


@dataclass
class ClaimResult:
    name: str
    passed: bool
    detail: str
    value: dict
    seconds: float
    bounds: dict = dc_field(default_factory=dict, repr=False)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _range_claim(name: str, spec: str, lo: float, hi: float) -> Callable[[Optional[float]], ClaimResult]:
    def run(tol: Optional[float]) -> ClaimResult:
        t = time.perf_counter()
        cb = certify_max(spec, tol=tol)
        ok = cb.ok and lo <= cb.lower and cb.upper <= hi
        detail = f"max in [{cb.lower:.6f}, {cb.upper:.6f}], required within [{lo}, {hi}]"
        return ClaimResult(name, ok, detail, cb.summary(), time.perf_counter() - t, {name: cb})

    return run


def _below_claim(name: str, spec: str, limit: float) -> Callable[[Optional[float]], ClaimResult]:
    def run(tol: Optional[float]) -> ClaimResult:
        t = time.perf_counter()
        cb = certify_max(spec, tol=tol)
        ok = cb.ok and cb.upper < limit
        sub = certify_max(spec, region=(0.75, 1.0, 0.0, 1.0), tol=tol)
        detail = (
            f"max in [{cb.lower:.6f}, {cb.upper:.6f}] at {tuple(round(v, 4) for v in cb.argmax)}, "
            f"required < {limit}; on x >= 3/4 max <= {sub.upper:.6f}"
        )
        value = cb.summary()
        value["restricted_x_ge_3_4"] = sub.summary()
        bounds = {name: cb, name + "-x-ge-3-4": sub}
        return ClaimResult(name, ok, detail, value, time.perf_counter() - t, bounds)

    return run


def _offdiag_claim(tol: Optional[float]) -> ClaimResult:
    t = time.perf_counter()
    rep = verify_offdiag_inequality(tol=tol)
    ok = rep.all_hold and rep.worst_mu_normalized == "1/5"
    margins = ", ".join(f"mu={r.mu}: {r.margin:.5f} ({r.normalized_margin:.4f}/lam)" for r in rep.rows)
    detail = f"margins {margins}; worst (per lam) mu={rep.worst_mu_normalized}"
    return ClaimResult("offdiag", ok, detail, rep.to_dict(), time.perf_counter() - t)


def _taylor_claim(tol: Optional[float]) -> ClaimResult:
    t = time.perf_counter()
    rep = verify_taylor_inequality()
    detail = (
        f"coefficients to degree {len(rep.coefficients) - 1} non-positive: {rep.coefficients_nonpositive}; "
        f"max upper bound on [{rep.series_cutoff}, 1]: {rep.interval_max_upper:.3e}"
    )
    return ClaimResult("taylor", rep.holds, detail, rep.to_dict(), time.perf_counter() - t)


CLAIMS: dict[str, Callable[[Optional[float]], ClaimResult]] = {
    "G": _range_claim("G", "G", 1.32, 1.34),
    "min-F-G": _range_claim("min-F-G", "min:F,G", 1.049, 1.059),
    "min-F-G2_5": _range_claim("min-F-G2_5", "min:F,G_mu:2/5", 1.0012, 1.0022),
    "min-Fhat-G2_5": _below_claim("min-Fhat-G2_5", "min:F_hat,G_mu:2/5", 0.985),
    "offdiag": _offdiag_claim,
    "taylor": _taylor_claim,
}


def run_claims(names: Sequence[str], tol: Optional[float] = None) -> list[ClaimResult]:
    if list(names) == ["all"]:
        names = list(CLAIMS)
    unknown = [n for n in names if n not in CLAIMS]
    if unknown:
        raise KeyError(f"unknown claim(s): {', '.join(unknown)}")
    return [CLAIMS[n](tol) for n in names]
