import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from fockvertex import fock, lattice
from fockvertex.fock import FockVector, TruncationConfig, window_blocks
from fockvertex.scalars import AdmissibleGroup
from fockvertex.verify import VerifyConfig, bracket_check, expected_mode_bracket
from fockvertex.vertex import (HeisenbergMode, LatticeMode, NormalOrderedMode, OpExpr, PairMode,
                               SumMode, clifford_anticommutator, commutator, normal_ordered_apply,
                               window_deviation, x_alpha_apply, x_ij_series, y_operator)

TC = TruncationConfig()
G = AdmissibleGroup(2, None, (1.3 + 0.45j,))
ONE = G.identity()
XI, Q = G.xi_power(1), G.q_power(1)
PARAMS = [ONE, XI, Q, XI * Q, Q.inverse()]
BLOCKS = window_blocks(2, TC)


def test_lattice_modes_on_vacuum_by_hand():
    vac = FockVector.vacuum(2)
    e1 = lattice.unit(1, 2)
    assert x_alpha_apply(e1, Fraction(-1, 2), vac, TC).distance(FockVector.vacuum(2, e1)) == 0
    # next coefficient of exp(sum e1(-n)/n z^n) is e1(-1)
    want = FockVector.basis_state(2, [(1, 1)], e1)
    assert x_alpha_apply(e1, Fraction(-3, 2), vac, TC).distance(want) < 1e-15
    assert not x_alpha_apply(e1, Fraction(1, 2), vac, TC).blocks


def test_lattice_mode_carries_cocycle_sign():
    v = FockVector.vacuum(2, (1, 0))
    e2 = lattice.unit(2, 2)
    # eps(e2, e1) = -1
    w = x_alpha_apply(e2, Fraction(-1, 2), v, TC)
    assert w.coefficient((), (1, 1)) == -1


def test_lowest_off_diagonal_mode_on_vacuum():
    # x_12(n_12 - 1, 1, 1) e^0 with n_12 = 0
    w = PairMode(2, 1, 2, ONE, ONE, -1).apply(FockVector.vacuum(2), TC)
    assert w.terms() == {((), (1, -1)): pytest.approx(1)}
    w = PairMode(2, 2, 1, ONE, ONE, -1).apply(FockVector.vacuum(2), TC)
    assert w.terms() == {((), (-1, 1)): pytest.approx(-1)}


@pytest.mark.parametrize("i,k", [(1, -2), (1, 0), (2, 1), (2, 3)])
def test_diagonal_untwisted_field_is_oscillator(i, k):
    expr = OpExpr.of(PairMode(2, i, i, ONE, ONE, k)) - HeisenbergMode(2, i, k)
    dev, n_exact, _ = window_deviation(expr, BLOCKS, TC, 2)
    assert n_exact and dev == 0


@pytest.mark.parametrize("a,i,j,k", [(a, i, j, k) for a in (XI, Q, XI * Q)
                                     for (i, j) in ((1, 2), (2, 2)) for k in (-1, 0, 1)])
def test_closed_form_equals_lattice_mode_sum(a, i, j, k):
    expr = OpExpr.of(PairMode(2, i, j, ONE, a, k)) - NormalOrderedMode(2, i, j, a, k)
    dev, n_exact, _ = window_deviation(expr, BLOCKS, TC, 2)
    assert n_exact > 0 and dev < 1e-9


def test_normal_ordered_apply_on_vacuum():
    vac = FockVector.vacuum(2)
    w1 = normal_ordered_apply(1, 1, Q, 0, vac, TC)
    w2 = PairMode(2, 1, 1, ONE, Q, 0).apply(vac, TC)
    assert w1.distance(w2) < 1e-12
    # degree-zero diagonal modes have no vacuum constant
    assert w2.max_abs() < 1e-12


def test_parameter_rescaling():
    # x_ij(k, a, b) = value(a)^-k x_ij(k, 1, a^-1 b)
    for k in (-2, 1):
        lhs = OpExpr.of(PairMode(2, 1, 2, Q, XI, k))
        rhs = OpExpr.of(PairMode(2, 1, 2, ONE, Q.inverse() * XI, k)).scaled(Q.value() ** (-k))
        dev, n_exact, _ = window_deviation(lhs - rhs, BLOCKS, TC, 2)
        assert n_exact and dev < 1e-12


def test_affine_bracket_by_hand():
    exp = expected_mode_bracket(2, 1, 2, 2, 1, ONE, ONE, ONE, ONE, 2, -2)
    names = sorted((op.i, op.j, c) for op, c in exp.terms)
    assert names == [(1, 1, 1), (2, 2, -1)]
    assert exp.central == 2


@settings(max_examples=12, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(range(5)), st.sampled_from(range(5)),
       st.sampled_from([(1, 2, 2, 1), (1, 1, 1, 2), (2, 2, 2, 2), (1, 2, 1, 2)]),
       st.integers(-1, 1), st.integers(-1, 1))
def test_mode_bracket_matches_brute_force(ia, ib, idx, m, n):
    i, j, k, l = idx
    A, B = PARAMS[ia], PARAMS[ib]
    exp = expected_mode_bracket(2, i, j, k, l, ONE, A, ONE, B, m, n)
    cfg = VerifyConfig(truncation=TruncationConfig(4, 8))
    dev, n_exact, _ = bracket_check(PairMode(2, i, j, ONE, A, m), PairMode(2, k, l, ONE, B, n), exp, cfg)
    assert n_exact and dev < 1e-9


def test_bracket_needs_the_wrap_sign():
    # xi * xi wraps the torsion exponent for |T| = 2; dropping the sign breaks the identity
    cfg = VerifyConfig(truncation=TruncationConfig(4, 8))
    exp = expected_mode_bracket(2, 1, 1, 1, 1, ONE, XI, ONE, XI, 1, 0)
    for t in range(len(exp.terms)):
        op, c = exp.terms[t]
        exp.terms[t] = (op, -c)
    dev, n_exact, _ = bracket_check(PairMode(2, 1, 1, ONE, XI, 1), PairMode(2, 1, 1, ONE, XI, 0),
                                    exp, cfg)
    assert dev > 0.1


def test_y_operator_is_sum_over_slots():
    y = y_operator(2, XI, Q, 1)
    v = FockVector.basis_state(2, [(1, 2)], (1, -1))
    want = PairMode(2, 1, 1, XI, Q, 1).apply(v, TC) + PairMode(2, 2, 2, XI, Q, 1).apply(v, TC)
    assert y.apply(v, TC).distance(want) < 1e-12


def test_sum_mode_rejects_mixed_shifts():
    s = SumMode([(1, PairMode(2, 1, 2, ONE, ONE, -1)), (1, PairMode(2, 1, 1, ONE, ONE, 0))])
    with pytest.raises(ValueError):
        s.apply(FockVector.vacuum(2), TC)


def test_opexpr_product_order():
    # (A * B) applies B first: e1(1) e1(-1) vac = vac, e1(-1) e1(1) vac = 0
    a, b = HeisenbergMode(2, 1, 1), HeisenbergMode(2, 1, -1)
    vac = FockVector.vacuum(2)
    assert (a * b).apply(vac, TC).distance(vac) == 0
    assert (b * a).apply(vac, TC).max_abs() == 0
    assert commutator(a, b).apply(vac, TC).distance(vac) == 0
    assert (OpExpr.identity(2.0) - OpExpr.identity()).apply(vac, TC).distance(vac) == 0


def test_intermediate_cutoff_marks_inexact():
    tiny = TruncationConfig(1, 1)
    expr = commutator(HeisenbergMode(2, 1, 1), HeisenbergMode(2, 1, -2))
    dev, n_exact, n_skip = window_deviation(expr, [((0, 0), 0)], tiny, 2)
    assert n_exact == 0 and n_skip == 1


def test_clifford_relations_small():
    devs = clifford_anticommutator((1, 0), Fraction(1, 2), Fraction(1, 2), BLOCKS, TC)
    assert all(v is not None and v < 1e-12 for v in devs.values())
    with pytest.raises(ValueError):
        clifford_anticommutator((1, 1), Fraction(1, 2), Fraction(1, 2), BLOCKS, TC)


def test_series_collects_nonzero_modes():
    res = x_ij_series(1, 2, ONE, FockVector.vacuum(2), TruncationConfig(2, 3))
    # X_12(1, z) . 1 = e^(e1-e2) z + higher powers of z
    nonzero = sorted(e for e, w in res.coefficients.items() if w.blocks)
    assert nonzero[0] == 1
    assert res.coefficients[1].terms() == {((), (1, -1)): pytest.approx(1)}
    assert all(res.exact[e] for e in nonzero)
