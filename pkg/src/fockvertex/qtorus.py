"""Quantum torus coordinates and centrally extended matrix loop algebras.

Elements are sparse: a dict from a basis key to a complex coefficient plus a
vector of central coordinates ``c_0..c_nu``.  Three key layouts are used:

* matrix loop algebra over M_n:   ``(row, col, alpha)``
* tensor form over M_m (x) M_n:    ``(i, j, k, l, alpha)``
* clock-shift form:                ``(i, j, k, alpha)`` standing for
  ``E_ij (x) F^k E^alpha[0] (x) t^alpha``

``alpha`` is always the full exponent tuple ``(alpha_0, ..., alpha_nu)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

MATRIX_TOL = 1e-12


@dataclass(frozen=True)
class QMatrix:
    """Multiplicatively antisymmetric matrix with q_ii = 1, q_ij q_ji = 1."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=complex)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("QMatrix must be square")
        if np.max(np.abs(np.diag(q) - 1)) > MATRIX_TOL:
            raise ValueError("diagonal entries must be 1")
        if np.max(np.abs(q * q.T - 1)) > MATRIX_TOL:
            raise ValueError("need q_ij * q_ji = 1")
        object.__setattr__(self, "q", q)

    @property
    def nu(self) -> int:
        return self.q.shape[0] - 1

    @classmethod
    def identity(cls, nu: int = 0) -> "QMatrix":
        return cls(np.ones((nu + 1, nu + 1), dtype=complex))

    @classmethod
    def from_q(cls, q: complex) -> "QMatrix":
        """Two variables with q_10 = q, so that t_1 t_0 = q t_0 t_1."""
        q = complex(q)
        return cls(np.array([[1, 1 / q], [q, 1]], dtype=complex))

    @classmethod
    def from_column(cls, qs: Sequence[complex]) -> "QMatrix":
        """q_s0 = qs[s-1] and q_ij = 1 for i, j >= 1."""
        nu = len(qs)
        m = np.ones((nu + 1, nu + 1), dtype=complex)
        for s, v in enumerate(qs, start=1):
            m[s, 0] = v
            m[0, s] = 1 / v
        return cls(m)

    def star(self, n: int) -> "QMatrix":
        """Entries in row 0 or column 0 raised to the n-th power."""
        m = self.q.copy()
        m[0, :] = m[0, :] ** n
        m[:, 0] = m[:, 0] ** n
        m[0, 0] = 1
        return QMatrix(m)


def sigma_q(Q: QMatrix, alpha: Sequence[int], beta: Sequence[int]) -> complex:
    """Structure constant of t^alpha t^beta = sigma(alpha, beta) t^(alpha+beta)."""
    if len(alpha) != Q.nu + 1 or len(beta) != Q.nu + 1:
        raise ValueError("exponent length does not match QMatrix")
    s = 1.0 + 0j
    for j in range(1, Q.nu + 1):
        if alpha[j] == 0:
            continue
        for i in range(j):
            e = alpha[j] * beta[i]
            if e:
                s *= Q.q[j, i] ** e
    return s


def _tup(a) -> Tuple[int, ...]:
    return tuple(int(x) for x in a)


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


@dataclass
class LoopElement:
    """Sparse element of a centrally extended loop-type algebra."""

    terms: Dict[tuple, complex] = field(default_factory=dict)
    central: Tuple[complex, ...] = (0j,)

    def copy(self) -> "LoopElement":
        return LoopElement(dict(self.terms), tuple(self.central))

    def add_term(self, key, coeff):
        if coeff != 0:
            self.terms[key] = self.terms.get(key, 0) + coeff

    def add_central(self, vec):
        self.central = tuple(a + b for a, b in zip(self.central, vec))

    def __add__(self, other: "LoopElement") -> "LoopElement":
        out = self.copy()
        for k, v in other.terms.items():
            out.add_term(k, v)
        out.add_central(other.central)
        return out

    def __sub__(self, other: "LoopElement") -> "LoopElement":
        return self + other.scaled(-1)

    def scaled(self, c) -> "LoopElement":
        return LoopElement({k: c * v for k, v in self.terms.items()},
                           tuple(c * a for a in self.central))

    def max_abs(self) -> float:
        vals = [abs(v) for v in self.terms.values()] + [abs(a) for a in self.central]
        return max(vals, default=0.0)

    def distance(self, other: "LoopElement") -> float:
        return (self - other).max_abs()

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol


def basis_element(key, nu: int, coeff=1.0) -> LoopElement:
    return LoopElement({key: complex(coeff)}, (0j,) * (nu + 1))


def central_element(s: int, nu: int, coeff=1.0) -> LoopElement:
    c = [0j] * (nu + 1)
    c[s] = complex(coeff)
    return LoopElement({}, tuple(c))


def loop_bracket(x: LoopElement, y: LoopElement, Q: QMatrix) -> LoopElement:
    """Bracket on (M_n (x) C_Q) + centre with the trace form.

    Keys are ``(row, col, alpha)``.  The central part of a pair of monomials
    is tr(xy) * sigma(alpha, beta) * sum_s alpha_s c_s when alpha + beta = 0.
    """
    nu = Q.nu
    out = LoopElement({}, (0j,) * (nu + 1))
    cen = [0j] * (nu + 1)
    for (i, j, a), u in x.terms.items():
        for (k, l, b), v in y.terms.items():
            ab = _vadd(a, b)
            if j == k:
                out.add_term((i, l, ab), u * v * sigma_q(Q, a, b))
            if l == i:
                out.add_term((k, j, ab), -u * v * sigma_q(Q, b, a))
            if j == k and l == i and not any(ab):
                s = u * v * sigma_q(Q, a, b)
                for t in range(nu + 1):
                    cen[t] += s * a[t]
    out.central = tuple(cen)
    return out


def tensor_bracket(x: LoopElement, y: LoopElement, Q: QMatrix) -> LoopElement:
    """Bracket on ((M_m (x) M_n) (x) C_Q) + centre, keys ``(i, j, k, l, alpha)``.

    The form is tr(XY) for X, Y in M_m (x) M_n, i.e. the product of traces.
    """
    nu = Q.nu
    out = LoopElement({}, (0j,) * (nu + 1))
    cen = [0j] * (nu + 1)
    for (i, j, k, l, a), u in x.terms.items():
        for (i2, j2, k2, l2, b), v in y.terms.items():
            ab = _vadd(a, b)
            if j == i2 and l == k2:
                out.add_term((i, j2, k, l2, ab), u * v * sigma_q(Q, a, b))
            if j2 == i and l2 == k:
                out.add_term((i2, j, k2, l, ab), -u * v * sigma_q(Q, b, a))
            if j == i2 and l == k2 and j2 == i and l2 == k and not any(ab):
                s = u * v * sigma_q(Q, a, b)
                for t in range(nu + 1):
                    cen[t] += s * a[t]
    out.central = tuple(cen)
    return out


def kron_identify(x: LoopElement, n: int) -> LoopElement:
    """E_ij (x) E_kl (x) t^a  ->  E_{(i-1)n+k, (j-1)n+l} (x) t^a; centre fixed."""
    out = LoopElement({}, tuple(x.central))
    for (i, j, k, l, a), v in x.terms.items():
        out.add_term(((i - 1) * n + k, (j - 1) * n + l, a), v)
    return out


def iso_f(x: LoopElement, Q: QMatrix, n: int) -> LoopElement:
    """Map from the algebra over Q* onto the clock-shift subalgebra over Q.

    Keys on both sides are tensor keys ``(i, j, k, l, alpha)``.  The image of
    E_ij (x) E_kl (x) tau^a is prod_s q_s0^(l a_s) E_ij (x) E_kl (x)
    t_0^(n a_0 + l - k) t^(a_1..) minus k delta_ij delta_kl delta_(a,0) c_0;
    central elements go to c_0 -> n c_0 and c_s -> c_s.
    """
    nu = Q.nu
    cen = [complex(c) for c in x.central]
    cen[0] *= n
    out = LoopElement({}, tuple(cen))
    c0 = 0j
    for (i, j, k, l, a), v in x.terms.items():
        pref = 1.0 + 0j
        for s in range(1, nu + 1):
            if a[s]:
                pref *= Q.q[s, 0] ** (l * a[s])
        bar = (n * a[0] + l - k,) + tuple(a[1:])
        out.add_term((i, j, k, l, bar), pref * v)
        if i == j and k == l and not any(a):
            c0 -= k * v
    out.add_central((c0,) + (0j,) * nu)
    return out


@dataclass(frozen=True)
class ClockShiftPair:
    E: np.ndarray
    F: np.ndarray
    xi: complex


def primitive_root(n: int) -> complex:
    return cmath.exp(2j * math.pi / n)


def clock_shift(n: int, xi: complex | None = None) -> ClockShiftPair:
    """Shift E = E_12 + ... + E_{n-1,n} + E_n1 and clock F = diag(xi^(i-1))."""
    if n < 1:
        raise ValueError("n must be positive")
    xi = primitive_root(n) if xi is None else complex(xi)
    if abs(xi ** n - 1) > MATRIX_TOL or any(abs(xi ** m - 1) <= MATRIX_TOL
                                            for m in range(1, n)):
        raise ValueError("xi must be a primitive n-th root of unity")
    E = np.zeros((n, n), dtype=complex)
    for r in range(n):
        E[r, (r + 1) % n] = 1
    F = np.diag([xi ** r for r in range(n)]).astype(complex)
    return ClockShiftPair(E, F, xi)


def ef_expand(i: int, j: int, n: int, xi: complex | None = None) -> Dict[Tuple[int, int], complex]:
    """Coefficients c_(k,l) with E_ij = sum c_(k,l) F^k E^l (l = j - i mod n)."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError("index out of range")
    xi = primitive_root(n) if xi is None else complex(xi)
    l = (j - i) % n
    return {(k, l): xi ** (k * (1 - i)) / n for k in range(n)}


def fe_units(k: int, l: int, n: int, xi: complex | None = None) -> Dict[Tuple[int, int], complex]:
    """Matrix units of F^k E^l: sum_r xi^(k(r-1)) E_{r, r+l mod n}."""
    xi = primitive_root(n) if xi is None else complex(xi)
    out = {}
    for r in range(1, n + 1):
        c = ((r - 1 + l) % n) + 1
        out[(r, c)] = xi ** (k * (r - 1))
    return out


def units_matrix(units: Dict[Tuple[int, int], complex], n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    for (r, c), v in units.items():
        m[r - 1, c - 1] += v
    return m


def lhat_to_tensor(x: LoopElement, n: int, xi: complex | None = None) -> LoopElement:
    """Rewrite clock-shift keys ``(i, j, k, alpha)`` in tensor keys."""
    out = LoopElement({}, tuple(x.central))
    for (i, j, k, a), v in x.terms.items():
        for (r, c), w in fe_units(k, a[0], n, xi).items():
            out.add_term((i, j, r, c, a), v * w)
    return out


def expand_tensor_generator(i: int, j: int, k: int, l: int, alpha: Sequence[int],
                            n: int, xi: complex | None = None) -> LoopElement:
    """E_ij (x) E_kl (x) t_0^(n a_0 + l - k) t^(a_1..) in clock-shift keys.

    Uses E_kl = (1/n) sum_s xi^(s(1-k)) F^s E^(l-k); since E^n = 1 the
    E-power can be taken equal to the t_0 exponent.
    """
    xi = primitive_root(n) if xi is None else complex(xi)
    a0 = n * alpha[0] + l - k
    key_alpha = (a0,) + tuple(alpha[1:])
    out = LoopElement({}, (0j,) * len(alpha))
    for (s, _), v in ef_expand(k, l, n, xi).items():
        out.add_term((i, j, s, key_alpha), v)
    return out


def lhat_bracket(x: LoopElement, y: LoopElement, Q: QMatrix, n: int,
                 xi: complex | None = None) -> LoopElement:
    """Structure constants in the clock-shift basis ``(i, j, k, alpha)``.

    [E_ij F^k E^a0 t^a, E_i'j' F^k' E^a0' t^a'] =
        d_ji' xi^(a0 k') sigma(a, a') E_ij' F^(k+k') E^(a0+a0') t^(a+a')
      - d_j'i xi^(a0' k) sigma(a', a) E_i'j F^(k+k') E^(a0+a0') t^(a+a')
      + n d_ji' d_ij' [k+k' = 0 mod n] [a+a' = 0] xi^(a0 k') sigma(a, a')
        sum_s a_s c_s
    """
    xi = primitive_root(n) if xi is None else complex(xi)
    nu = Q.nu
    out = LoopElement({}, (0j,) * (nu + 1))
    cen = [0j] * (nu + 1)
    for (i, j, k, a), u in x.terms.items():
        if len(a) != nu + 1:
            raise ValueError("exponent length does not match QMatrix")
        for (i2, j2, k2, b), v in y.terms.items():
            ab = _vadd(a, b)
            kk = (k + k2) % n
            if j == i2:
                out.add_term((i, j2, kk, ab), u * v * xi ** (a[0] * k2) * sigma_q(Q, a, b))
            if j2 == i:
                out.add_term((i2, j, kk, ab), -u * v * xi ** (b[0] * k) * sigma_q(Q, b, a))
            if j == i2 and i == j2 and kk == 0 and not any(ab):
                s = n * u * v * xi ** (a[0] * k2) * sigma_q(Q, a, b)
                for t in range(nu + 1):
                    cen[t] += s * a[t]
    out.central = tuple(cen)
    return out
