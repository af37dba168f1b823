"""Complex scalar helpers, admissible groups and branch-fixed powers.

Powers of group elements are always taken from the exponent presentation
``a = xi^(-n0) * q_1^(n_1) * ... * q_k^(n_k)`` with ``0 <= n0 < |T|``, never
from the numerical value.  Two elements with equal values but different
presentations can have different fractional powers.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Sequence, Tuple

DEFAULT_Q = complex(1.3, 0.45)
ROOT_TOL = 1e-12


def principal_log(a: complex) -> complex:
    """Logarithm with imaginary part in [0, 2*pi).

    :param a: nonzero complex number
    :raises ValueError: if ``a`` is zero
    """
    a = complex(a)
    if a == 0:
        raise ValueError("principal_log is undefined at 0")
    theta = math.atan2(a.imag, a.real)
    if theta < 0:
        theta += 2 * math.pi
    if theta >= 2 * math.pi:
        theta = 0.0
    return complex(math.log(abs(a)), theta)


def parse_complex(text: str) -> complex:
    """Parse literals such as ``"1.3+0.45i"``, ``"2"``, ``"-i"`` or ``"1+0j"``."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("J", "j")
    s = s.replace("i", "j")
    if s in ("j", "+j"):
        return 1j
    if s == "-j":
        return -1j
    if s.endswith("+j") or s.endswith("-j"):
        s = s[:-1] + "1j"
    try:
        return complex(s)
    except ValueError as exc:
        raise ValueError(f"cannot parse complex literal {text!r}") from exc


def is_root_of_unity(q: complex, max_order: int = 24, tol: float = 1e-9) -> bool:
    """True if ``q`` is (numerically) a root of unity of order <= ``max_order``.

    Anything off the unit circle is accepted as not a root of unity.
    """
    q = complex(q)
    if abs(abs(q) - 1.0) > tol:
        return False
    p = 1.0 + 0j
    for _ in range(max_order):
        p *= q
        if abs(p - 1.0) <= tol:
            return True
    return False


def _to_exponent(r):
    if isinstance(r, Fraction):
        return float(r)
    return r


@dataclass(frozen=True)
class AdmissibleGroup:
    """A group ``T x F`` with ``T`` cyclic of order ``torsion_order``.

    ``xi`` generates ``T`` and ``free_generators`` are the ``q_j``.  The free
    generators are assumed multiplicatively independent and not roots of
    unity; this is not checked.
    """

    torsion_order: int = 1
    xi: complex | None = None
    free_generators: Tuple[complex, ...] = ()

    def __post_init__(self):
        n = int(self.torsion_order)
        if n < 1:
            raise ValueError("torsion order must be positive")
        xi = cmath.exp(2j * math.pi / n) if self.xi is None else complex(self.xi)
        if abs(xi ** n - 1) > ROOT_TOL:
            raise ValueError(f"xi is not an {n}-th root of unity")
        for m in range(1, n):
            if abs(xi ** m - 1) <= ROOT_TOL:
                raise ValueError(f"xi is not a primitive {n}-th root of unity")
        object.__setattr__(self, "torsion_order", n)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "free_generators",
                           tuple(complex(q) for q in self.free_generators))

    @property
    def rank(self) -> int:
        return len(self.free_generators)

    def element(self, n0: int = 0, free: Sequence[int] = ()) -> "GroupElement":
        """The element ``xi^(-n0) * prod q_j^(free_j)`` (``n0`` is reduced)."""
        free = tuple(int(x) for x in free) + (0,) * (self.rank - len(free))
        if len(free) != self.rank:
            raise ValueError("too many free exponents")
        return GroupElement(self, int(n0) % self.torsion_order, free)

    def identity(self) -> "GroupElement":
        return self.element()

    def xi_power(self, k: int) -> "GroupElement":
        """``xi^k`` in normal form, i.e. ``n0 = -k mod |T|``."""
        return self.element(-k)

    def q_power(self, e: int, j: int = 0) -> "GroupElement":
        free = [0] * self.rank
        free[j] = e
        return self.element(0, free)

    def log_xi(self) -> complex:
        return principal_log(self.xi)


@dataclass(frozen=True)
class GroupElement:
    group: AdmissibleGroup = field(repr=False, compare=True)
    n0: int
    free: Tuple[int, ...]

    def value(self) -> complex:
        g = self.group
        v = g.xi ** (-self.n0)
        for q, e in zip(g.free_generators, self.free):
            v *= q ** e
        return v

    def log(self) -> complex:
        """Presentation-dependent logarithm used by :func:`group_power`."""
        g = self.group
        s = -self.n0 * g.log_xi() if self.n0 else 0j
        for q, e in zip(g.free_generators, self.free):
            if e:
                s += e * principal_log(q)
        return s

    def is_identity(self) -> bool:
        return self.n0 == 0 and not any(self.free)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if other.group != self.group:
            raise ValueError("elements of different groups")
        return self.group.element(self.n0 + other.n0,
                                  [a + b for a, b in zip(self.free, other.free)])

    def inverse(self) -> "GroupElement":
        return self.group.element(-self.n0, [-a for a in self.free])

    def __truediv__(self, other: "GroupElement") -> "GroupElement":
        return self * other.inverse()

    def __pow__(self, m: int) -> "GroupElement":
        return self.group.element(self.n0 * m, [a * m for a in self.free])

    def power(self, r) -> complex:
        return group_power(self, r)

    def __repr__(self):
        return f"GroupElement(n0={self.n0}, free={self.free})"


def group_power(g: GroupElement, r) -> complex:
    """``g^r`` from the exponent presentation of ``g``.

    Integer ``r`` reproduces ``value(g)**r``; other ``r`` depend on ``n0``.
    """
    if g.is_identity():
        return 1.0 + 0j
    if isinstance(r, (int, Fraction)) and Fraction(r).denominator == 1:
        return complex(g.value() ** int(r))
    if not isinstance(r, Number):
        raise TypeError("exponent must be a number")
    return cmath.exp(_to_exponent(r) * g.log())
