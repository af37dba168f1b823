from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fockvertex import lattice

vec3 = st.tuples(*[st.integers(-4, 4)] * 3)


@given(vec3, vec3, vec3)
def test_cocycle_bimultiplicative(u, v, w):
    assert lattice.cocycle(lattice.add(u, v), w) == lattice.cocycle(u, w) * lattice.cocycle(v, w)
    assert lattice.cocycle(u, lattice.add(v, w)) == lattice.cocycle(u, v) * lattice.cocycle(u, w)


@given(vec3.filter(lambda v: sum(v) == 0), vec3.filter(lambda v: sum(v) == 0))
def test_cocycle_sign_laws_on_root_lattice(a, b):
    assert lattice.cocycle(a, a) == (-1) ** (lattice.inner(a, a) // 2)
    assert lattice.cocycle(a, b) * lattice.cocycle(b, a) == (-1) ** lattice.inner(a, b)


def test_cocycle_on_basis():
    e1, e2 = lattice.unit(1, 2), lattice.unit(2, 2)
    assert lattice.cocycle(e1, e2) == 1
    assert lattice.cocycle(e2, e1) == -1
    assert lattice.cocycle(e1, e1) == 1


def test_fractional_cocycle_uses_exponential():
    v = (0, Fraction(1, 2))
    w = (1, 0)
    assert lattice.cocycle(v, w) == pytest.approx(1j)


def test_root_and_sector_lattices():
    assert lattice.in_root_lattice((1, -1, 0))
    assert not lattice.in_root_lattice((1, 0))
    assert not lattice.in_root_lattice((Fraction(1, 2), Fraction(-1, 2)))
    assert lattice.in_sector_lattice((Fraction(1, 3), Fraction(1, 3)))
    assert lattice.in_sector_lattice((Fraction(1, 2), Fraction(-1, 2)))
    assert not lattice.in_sector_lattice((Fraction(1, 2), 0))
    assert lattice.same_coset((Fraction(1, 3), Fraction(1, 3)), (Fraction(4, 3), Fraction(-2, 3)))


def test_boxes():
    assert len(list(lattice.box(2, 1))) == 9
    assert sorted(lattice.root_lattice_box(2, 1)) == [(-1, 1), (0, 0), (1, -1)]
    with pytest.raises(ValueError):
        lattice.inner((1, 2), (1,))
