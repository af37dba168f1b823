"""Acceptance criteria 1-13, one printed PASS/FAIL line each.

Tolerances are pinned here rather than taken from suite defaults.
"""
import math

from conftest import ACCEPTANCE_LINES, cached_suite
from fockvertex.fock import TruncationConfig
from fockvertex.verify import REP_MAPS, VerifyConfig

CFG = VerifyConfig()
BIG = VerifyConfig(truncation=TruncationConfig(8, 12))

TOL_MATRIX = 1e-12
TOL_TORUS = 1e-10
TOL_ISO = 1e-9
TOL_OPERATOR = 1e-9
TOL_DELTA = 1e-12
TOL_HOM = 1e-8
WITNESS_MIN = 0.1
TRUNCATION_FACTOR = 10.0


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    return ok


def worst(cases):
    return max((c.max_abs_error for c in cases if c.max_abs_error is not None), default=math.inf)


def all_within(cases, tol):
    return bool(cases) and all(c.exact and c.max_abs_error is not None and c.max_abs_error <= tol
                               for c in cases)


def test_criterion_01_matrix_identities():
    r = cached_suite("matrix", CFG)
    sizes = {c.description.split()[0] for c in r.cases}
    ok = all_within(r.cases, TOL_MATRIX) and sizes == {"n=1", "n=2", "n=3", "n=4", "n=6"}
    assert record(1, ok, f"clock-shift relations, n in 1,2,3,4,6, max error {worst(r.cases):.1e}")


def test_criterion_02_torus_structure_constants():
    r = cached_suite("qtorus", CFG)
    cases = [c for c in r.cases if "200 triples" in c.description]
    ok = len(cases) == 4 and all_within(cases, TOL_TORUS)
    assert record(2, ok, f"biadditivity and associativity, nu=1,2, max {worst(cases):.1e}")


def test_criterion_03_isomorphisms():
    r = cached_suite("iso-prop15", CFG)
    kron = [c for c in r.cases if c.description.startswith("Kronecker")]
    iso = [c for c in r.cases if c.description.startswith("clock-shift isomorphism")]
    central = [c for c in r.cases if "c0 -> n c0" in c.description]
    ok = all_within(r.cases, TOL_ISO) and kron and iso and central
    assert record(3, bool(ok), f"{len(kron)} + {len(iso)} size pairs of 50 brackets, "
                               f"central image checked, max {worst(r.cases):.1e}")


def test_criterion_04_heisenberg_and_cocycle():
    h = cached_suite("heisenberg", CFG)
    c = cached_suite("cocycle", CFG)
    ok = all_within(h.cases, TOL_OPERATOR) and all_within(c.cases, 0.0)
    assert record(4, ok, f"oscillators M=1..3 max {worst(h.cases):.1e}; cocycle violations "
                         f"{int(worst(c.cases))}")


def test_criterion_05_clifford():
    r = cached_suite("clifford", CFG)
    ok = len(r.cases) == 2 * 36 * 3 and all_within(r.cases, TOL_OPERATOR)
    assert record(5, ok, f"{len(r.cases)} anticommutators, max {worst(r.cases):.1e}")


def test_criterion_06_mode_brackets():
    r = cached_suite("thm237", CFG)
    oracle = cached_suite("normal-order", CFG)
    flags = [c for c in r.cases if c.description.startswith("every index case")]
    brackets = [c for c in r.cases if c not in flags]
    ok = (all_within(brackets, TOL_OPERATOR) and flags and flags[0].passed
          and all_within(oracle.cases, TOL_OPERATOR))
    assert record(6, bool(ok), f"{len(brackets)} brackets max {worst(brackets):.1e}; "
                               f"closed form vs mode sums max {worst(oracle.cases):.1e}")


def test_criterion_07_two_pole_identity():
    r = cached_suite("delta", CFG)
    cases = [c for c in r.cases if c.description.startswith("two-pole")]
    names = {c.description.split()[2] for c in cases}
    ok = {"(2,3)", "(2,1/2)", "(q,1/q)"} <= names and all_within(cases, TOL_DELTA)
    assert record(7, ok, f"window 8, pairs {sorted(names)}, max {worst(cases):.1e}")


def test_criterion_08_limit():
    r = cached_suite("limit248", CFG)
    ok = r.passed and all(c.passed for c in r.cases)
    assert record(8, ok, "error ratio per decade of |1-ab| within (5, 20) for t=3..6")


def test_criterion_09_representations():
    details, ok = [], True
    for name in REP_MAPS:
        r = cached_suite(name, CFG)
        good = len(r.cases) == 30 and all_within(r.cases, TOL_HOM)
        ok = ok and good
        details.append(f"{name} {worst(r.cases):.0e}")
    assert record(9, ok, "30 pairs each: " + ", ".join(details))


def test_criterion_10_stretched_modes():
    a = cached_suite("prop420", CFG)
    b = cached_suite("prop421", CFG)
    ok = all_within(a.cases, TOL_HOM) and all_within(b.cases, TOL_HOM)
    assert record(10, ok, f"stretched map max {worst(a.cases):.1e}, cross brackets max "
                          f"{worst(b.cases):.1e}")


def test_criterion_11_dual_pair():
    r = cached_suite("dualpair", CFG)
    witness = [c for c in r.cases if c.description.startswith("witness [")]
    brackets = [c for c in r.cases if c.description.startswith("[")]
    size = float(witness[0].description.split("size ")[1].split()[0]) if witness else 0.0
    ok = all_within(brackets, TOL_OPERATOR) and witness and size >= WITNESS_MIN
    assert record(11, bool(ok), f"{len(brackets)} commuting brackets max {worst(brackets):.1e}; "
                                f"witness size {size:.3f}")


def test_criterion_12_sectors():
    r = cached_suite("sector", CFG)
    ok = r.passed and len(r.cases) >= 2
    assert record(12, ok, "; ".join(c.description for c in r.cases[:2]) + " ...")


def _ratios(small, big):
    out = []
    for a, b in zip(small.cases, big.cases):
        assert a.description == b.description
        if a.max_abs_error is None or b.max_abs_error is None:
            continue
        lo, hi = sorted((a.max_abs_error, b.max_abs_error))
        out.append((hi / lo if lo > 0 else (math.inf if hi > 0 else 1.0), a, b))
    return out


def test_criterion_13_truncation_independence():
    detail, ok = [], True
    for name in ("clifford", "thm237"):
        small, big = cached_suite(name, CFG), cached_suite(name, BIG)
        same = [a.passed for a in small.cases] == [b.passed for b in big.cases]
        ratios = _ratios(small, big)
        over = [r for r in ratios if r[0] > TRUNCATION_FACTOR]
        suite_ratio = max(big.max_error, small.max_error) / max(min(big.max_error, small.max_error), 1e-300)
        ok = ok and same and not over
        detail.append(f"{name}: verdicts {'same' if same else 'CHANGED'}, suite max "
                      f"{small.max_error:.1e}->{big.max_error:.1e} ({suite_ratio:.0f}x), "
                      f"{len(over)}/{len(ratios)} cases over {TRUNCATION_FACTOR:.0f}x")
    assert record(13, ok, "; ".join(detail))


def test_truncation_keeps_verdicts_and_roundoff_scale():
    """Companion to criterion 13: at both cutoffs every bracket deviation stays
    at the roundoff scale of the products being compared."""
    for name in ("clifford", "thm237"):
        small, big = cached_suite(name, CFG), cached_suite(name, BIG)
        assert [a.passed for a in small.cases] == [b.passed for b in big.cases]
        for r in (small, big):
            rel = [c.relative_error for c in r.cases if c.relative_error is not None]
            assert max(rel) < 1e-12
