from fractions import Fraction

import numpy as np
import pytest

from fockvertex.qtorus import LoopElement
from fockvertex.verify import (CaseResult, SuiteReport, VerifyConfig, central_coefficient,
                               delta_lhs, delta_rhs, delta_derivative_check, bracket_case, rep_map,
                               run_suite)
from fockvertex.vertex import OpExpr, PairMode


def series_oracle(a, b, window):
    """Expand both products of geometric series in x = z2/z1 and subtract."""
    top = window + 3
    geo = lambda r: [r ** p for p in range(top)]
    first = np.convolve(np.array(geo(1 / a), dtype=object), np.array(geo(b), dtype=object))
    second = np.convolve(np.array(geo(1 / b), dtype=object), np.array(geo(a), dtype=object))
    out = {e: Fraction(0) for e in range(-window, window + 1)}
    for e in range(0, window + 1):
        out[e] += first[e]
    # (a z1/z2)(z1/(b z2)) = (a/b) x^-2, then powers of x^-1
    for p in range(0, window + 1):
        e = -2 - p
        if e >= -window:
            out[e] -= Fraction(a) / b * second[p]
    return out


@pytest.mark.parametrize("a,b", [(Fraction(2), Fraction(3)), (Fraction(2), Fraction(1, 2)),
                                 (Fraction(-3, 5), Fraction(7, 2))])
def test_two_pole_series_expansion_against_convolution(a, b):
    assert delta_lhs(a, b, 8) == series_oracle(a, b, 8)


@pytest.mark.parametrize("a,b", [(Fraction(2), Fraction(3)), (Fraction(2), Fraction(1, 2))])
def test_two_pole_identity_exact(a, b):
    assert delta_lhs(a, b, 8) == delta_rhs(a, b, 8)


def test_two_pole_identity_complex():
    q = 1.3 + 0.45j
    lhs, rhs = delta_lhs(q, 1 / q, 8), delta_rhs(q, 1 / q, 8)
    assert max(abs(lhs[e] - rhs[e]) / max(1, abs(rhs[e])) for e in lhs) < 1e-12


def test_substitution_identities_on_random_polynomials():
    rng = np.random.default_rng(3)
    Y = {(p, r): np.array(complex(rng.normal(), rng.normal()))
         for p in range(-2, 3) for r in range(-2, 3)}
    assert delta_derivative_check(Y, 1.3 + 0.45j, 4) < 1e-10
    assert delta_derivative_check(Y, 2.0, 4) < 1e-10


def test_central_coefficient_approaches_limit():
    q = 1.3 + 0.45j
    errs = [abs(central_coefficient(q, (1 + h) / q, 2, np.sqrt(1 + h)) - 2 * q ** -2)
            for h in (1e-3, 1e-4, 1e-5)]
    assert errs[0] / errs[1] == pytest.approx(10, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(10, rel=0.05)


def test_bracket_case_labels():
    assert bracket_case(1, 2, 2, 1, False) == "case1"
    assert bracket_case(1, 1, 1, 2, False) == "case2"
    assert bracket_case(1, 1, 1, 2, True) == "case3"
    assert bracket_case(1, 1, 2, 2, True) == "case4"


def test_report_without_exact_cases_fails():
    r = SuiteReport("x", 0, {})
    assert not r.passed
    r.add("skipped", None, exact=False)
    assert not r.passed
    r.add("ok", 0.0)
    assert r.passed and r.max_error == 0.0
    r.add("bad", 1.0)
    assert not r.passed
    assert r.to_dict()["cases"][0]["exact"] is False


def test_relative_error_uses_scale():
    c = CaseResult("c", 1e-12, True, True, scale=100.0)
    assert c.relative_error == pytest.approx(1e-14)


def test_rep_map_images():
    cfg = VerifyConfig()
    rm = rep_map("cor42", cfg)
    img = rm.image(LoopElement({(1, 2, (3,)): 2.0}, (1.0,)))
    assert len(img.terms) == 2
    (c1, (op,)), (c2, ()) = img.terms
    assert isinstance(op, PairMode) and op.k == 3 and c1 == 2.0 and c2 == 1.0
    with pytest.raises(KeyError):
        rep_map("nope", cfg)


def test_run_suite_unknown():
    with pytest.raises(KeyError):
        run_suite("nope", VerifyConfig())


@pytest.mark.parametrize("name", ["matrix", "cocycle", "delta", "limit248", "sector", "fock"])
def test_fast_suites_pass(name, suite, default_cfg):
    r = suite(name, default_cfg)
    assert r.passed, [c for c in r.cases if not c.passed]
