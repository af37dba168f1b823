import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fockvertex.scalars import (AdmissibleGroup, group_power, is_root_of_unity, parse_complex,
                                principal_log)

nonzero = st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False,
                             allow_infinity=False)


@given(nonzero)
def test_principal_log_inverts_exp_with_argument_in_range(a):
    lg = principal_log(a)
    assert 0 <= lg.imag < 2 * math.pi
    assert abs(cmath.exp(lg) - a) <= 1e-12 * abs(a)


def test_principal_log_on_negative_axis_and_zero():
    assert principal_log(-1) == complex(0, math.pi)
    assert principal_log(-1j).imag == pytest.approx(1.5 * math.pi)
    with pytest.raises(ValueError):
        principal_log(0)


@pytest.mark.parametrize("text,value", [
    ("1.3+0.45i", 1.3 + 0.45j), ("2", 2), ("-i", -1j), ("i", 1j), ("1+0j", 1),
    (" 0.5 - 2i ", 0.5 - 2j), ("3-i", 3 - 1j),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


def test_parse_complex_rejects_garbage():
    with pytest.raises(ValueError):
        parse_complex("one")


def test_root_of_unity_probe():
    assert is_root_of_unity(1)
    assert is_root_of_unity(cmath.exp(2j * math.pi / 7))
    assert not is_root_of_unity(1.3 + 0.45j)
    assert not is_root_of_unity(cmath.exp(2j))
    # order above the probe bound is accepted as generic
    assert not is_root_of_unity(cmath.exp(2j * math.pi / 25))


G = AdmissibleGroup(3, None, (1.3 + 0.45j, 0.8 - 0.1j))
exps = st.integers(-4, 4)
elements = st.builds(lambda n0, a, b: G.element(n0, (a, b)), exps, exps, exps)


@given(elements, elements)
def test_group_is_abelian_and_values_multiply(g, h):
    assert g * h == h * g
    assert abs((g * h).value() - g.value() * h.value()) < 1e-9 * abs(g.value() * h.value())
    assert (g * g.inverse()).is_identity()


@given(elements, st.integers(-3, 3))
def test_integer_powers_match_values(g, r):
    assert abs(group_power(g, r) - g.value() ** r) <= 1e-9 * abs(g.value() ** r)


@given(elements)
def test_half_power_squares_to_value(g):
    h = group_power(g, Fraction(1, 2))
    assert abs(h * h - g.value()) <= 1e-12 * max(1, abs(g.value()))


def test_half_powers_depend_on_presentation():
    # n0 = 2 twice wraps to n0 = 1, which flips the sign of the half power
    G3 = AdmissibleGroup(3)
    a, b = G3.xi_power(-2), G3.xi_power(-2)
    prod = group_power(a, Fraction(1, 2)) * group_power(b, Fraction(1, 2))
    assert abs(prod + group_power(a * b, Fraction(1, 2))) < 1e-12


def test_xi_power_normal_form():
    G4 = AdmissibleGroup(4)
    assert G4.xi_power(1).n0 == 3
    assert G4.xi_power(-1).n0 == 1
    assert abs(G4.xi_power(1).value() - 1j) < 1e-15


def test_group_validates_torsion_generator():
    with pytest.raises(ValueError):
        AdmissibleGroup(4, xi=-1)
    with pytest.raises(ValueError):
        AdmissibleGroup(0)
