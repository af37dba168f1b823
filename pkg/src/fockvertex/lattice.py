"""Coordinate lattices in the orthonormal basis e_1..e_M and the sign cocycle.

Vectors are plain sequences of coordinates (ints, Fractions or complex).
"""
from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction
from typing import Iterator, Sequence, Tuple

SECTOR_TOL = 1e-9


def _is_integral(x) -> bool:
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    return False


def unit(i: int, M: int) -> Tuple[int, ...]:
    """The basis vector e_i, 1-based."""
    return tuple(1 if k == i - 1 else 0 for k in range(M))


def add(v: Sequence, w: Sequence) -> tuple:
    _check(v, w)
    return tuple(a + b for a, b in zip(v, w))


def sub(v: Sequence, w: Sequence) -> tuple:
    _check(v, w)
    return tuple(a - b for a, b in zip(v, w))


def scale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def _check(v, w):
    if len(v) != len(w):
        raise ValueError(f"length mismatch: {len(v)} vs {len(w)}")


def inner(v: Sequence, w: Sequence):
    """The symmetric form with (e_i, e_j) = delta_ij."""
    _check(v, w)
    return sum((a * b for a, b in zip(v, w)), 0)


def cocycle_exponent(v: Sequence, w: Sequence):
    """sum_{i>j} v_i w_j, the exponent of -1 in the cocycle."""
    _check(v, w)
    total = 0
    for i in range(len(v)):
        if v[i] == 0:
            continue
        for j in range(i):
            total += v[i] * w[j]
    return total


def cocycle(v: Sequence, w: Sequence):
    """Bimultiplicative sign with eps(e_i, e_j) = -1 iff i > j.

    Integer inputs give an exact int +-1.  Otherwise each factor
    (-1)^x is read as exp(i*pi*x).
    """
    x = cocycle_exponent(v, w)
    if _is_integral(x):
        return -1 if int(x) % 2 else 1
    if isinstance(x, Fraction):
        x = float(x)
    return cmath.exp(1j * math.pi * x)


def simple_roots(M: int) -> list:
    return [tuple(1 if k == j else (-1 if k == j + 1 else 0) for k in range(M))
            for j in range(M - 1)]


def in_root_lattice(v: Sequence) -> bool:
    """Integer vector with coordinate sum zero."""
    return all(_is_integral(a) for a in v) and sum(v) == 0


def in_sector_lattice(v: Sequence, tol: float = SECTOR_TOL) -> bool:
    """True iff (v, e_j - e_{j+1}) is an integer for every j."""
    for root in simple_roots(len(v)):
        x = inner(v, root)
        if _is_integral(x):
            continue
        x = complex(x)
        if abs(x.imag) > tol or abs(x.real - round(x.real)) > tol:
            return False
    return True


def same_coset(v: Sequence, w: Sequence) -> bool:
    """v - w lies in the root lattice (exact arithmetic expected)."""
    return in_root_lattice(sub(v, w))


def box(M: int, radius: int) -> Iterator[Tuple[int, ...]]:
    """All integer vectors with |coords| <= radius."""
    return itertools.product(range(-radius, radius + 1), repeat=M)


def root_lattice_box(M: int, radius: int) -> Iterator[Tuple[int, ...]]:
    return (v for v in box(M, radius) if sum(v) == 0)
