from __future__ import annotations

import copy
import json

import numpy as np
import pytest

from ramsey_books.certify import (
    CLAIMS,
    certify_max,
    check_certificate,
    contour_grid,
    emit_contour,
    run_claims,
    verify_offdiag_inequality,
    verify_taylor_inequality,
)
from ramsey_books.fields import Field


@pytest.fixture(scope="module")
def g_bound():
    return certify_max("G")


def test_g_maximum(g_bound):
    assert g_bound.ok
    assert 1.32 <= g_bound.lower <= g_bound.upper <= 1.34
    assert g_bound.upper - g_bound.lower <= 1e-4 + 1e-9
    x, y = g_bound.argmax
    assert x == pytest.approx(1.0, abs=1e-3) and 0.28 < y < 0.32
    # the certified interval contains a fine grid maximum
    _, _, V = contour_grid("G", 401)
    assert g_bound.lower - 1e-12 <= V.max() <= g_bound.upper


@pytest.mark.parametrize(
    "spec, lo, hi",
    [("min:F,G", 1.049, 1.059), ("min:F,G_mu:2/5", 1.0012, 1.0022)],
)
def test_min_field_maxima(spec, lo, hi):
    cb = certify_max(spec)
    assert cb.ok and lo <= cb.lower and cb.upper <= hi


def test_fhat_maximum_value():
    cb = certify_max("min:F_hat,G_mu:2/5")
    assert cb.ok
    assert 0.9949 < cb.lower <= cb.upper < 0.9952
    assert cb.argmax[0] < 0.75  # the maximum sits just left of the penalty line
    sub = certify_max("min:F_hat,G_mu:2/5", region=(0.75, 1.0, 0.0, 1.0))
    assert sub.upper < 0.985


def test_certificate_replay(g_bound, tmp_path):
    path = tmp_path / "g.json"
    g_bound.write_certificate(path)
    rep = check_certificate(path)
    assert rep.ok, rep.problems


def test_certificate_tampering_detected(g_bound):
    cert = g_bound.certificate_dict()
    bad = copy.deepcopy(cert)
    bad["cells"][0][4] -= 0.5
    assert not check_certificate(bad).bounds_reproduced
    bad = copy.deepcopy(cert)
    del bad["cells"][3]
    assert not check_certificate(bad).tiles_region
    bad = copy.deepcopy(cert)
    bad["upper"] = cert["upper"] - 0.01
    assert not check_certificate(bad).upper_consistent
    bad = copy.deepcopy(cert)
    bad["lower"] = cert["lower"] + 0.01
    assert not check_certificate(bad).lower_witnessed


def test_certificate_is_deterministic():
    a = json.dumps(certify_max("min:F,G").certificate_dict())
    b = json.dumps(certify_max("min:F,G").certificate_dict())
    assert a == b


def test_budget_exceeded():
    cb = certify_max("G", tol=1e-9, budget=300)
    assert cb.status == "budget_exceeded" and not cb.ok
    assert cb.lower <= cb.upper


def test_certify_errors():
    with pytest.raises(ValueError):
        certify_max("G", tol=0)
    with pytest.raises(ValueError):
        certify_max("G", region=(0.5, 0.2, 0.0, 1.0))


def test_tolerance_from_environment(monkeypatch):
    monkeypatch.setenv("RAMSEY_TOL", "1e-3")
    cb = certify_max("G")
    assert cb.tol == 1e-3 and cb.upper - cb.lower <= 1e-3 + 1e-9


def test_offdiag_report():
    rep = verify_offdiag_inequality()
    assert rep.all_hold
    assert [str(r.mu) for r in rep.rows] == ["1/100", "1/20", "1/10", "1/5"]
    assert rep.worst_mu_normalized == "1/5"
    assert rep.worst_mu == "1/100"  # the absolute margin is smallest at the other end
    for r in rep.rows:
        assert r.sup_lower <= r.sup_upper < r.rhs
        assert r.normalized_margin == pytest.approx(r.margin / float(r.lam))
    with pytest.raises(ValueError):
        verify_offdiag_inequality(mus=[0.3])


def test_taylor_report():
    rep = verify_taylor_inequality()
    assert rep.holds and rep.coefficients_nonpositive
    assert rep.interval_max_upper < 0
    assert rep.endpoint_values[0] == pytest.approx(0.0, abs=1e-15)
    assert rep.endpoint_values[1] == pytest.approx(-0.65)


def test_taylor_fails_without_series_part():
    # starting the interval part at 0 cannot succeed: D(0) = 0 is not < 0
    assert not verify_taylor_inequality(series_cutoff=0.0, tol=1e-4).holds


def test_contour_corners():
    text = emit_contour("G", 2)
    rows = [line.split(",") for line in text.strip().splitlines()]
    assert rows[0] == ["x", "y", "value"]
    values = {(float(x), float(y)): float(v) for x, y, v in rows[1:]}
    assert values == {(0.0, 0.0): 0.0, (0.0, 1.0): -1.0, (1.0, 0.0): 1.0, (1.0, 1.0): pytest.approx(1.0)}


def test_contour_indicators():
    def ones(spec):
        text = emit_contour(spec, 400, threshold=1.0)
        return sum(int(line.rsplit(",", 1)[1]) for line in text.strip().splitlines()[1:])

    assert ones("min:F,G") > 0
    assert ones("min:F_hat,G_mu:2/5") == 0


def test_contour_refinement_monotone():
    for spec in ["G", "min:F,G", "min:F,G_mu:2/5"]:
        prev = -np.inf
        for res in (26, 51, 101, 201):  # nested grids
            m = contour_grid(spec, res)[2].max()
            assert m >= prev
            prev = m


def test_contour_errors():
    with pytest.raises(ValueError):
        emit_contour("G", 1)


def test_claim_registry():
    assert set(CLAIMS) == {"G", "min-F-G", "min-F-G2_5", "min-Fhat-G2_5", "offdiag", "taylor"}
    res = run_claims(["G", "offdiag"])
    assert [r.name for r in res] == ["G", "offdiag"]
    assert all(r.passed for r in res)
    assert res[0].line().startswith("PASS G:")
    with pytest.raises(KeyError):
        run_claims(["nope"])
