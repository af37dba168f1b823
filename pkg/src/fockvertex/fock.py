"""Truncated bosonic Fock space S(H^-) (x) C[lattice] and its basic operators.

A vector is stored block-wise: one dense coefficient array per
``(charge, oscillator degree)`` pair, indexed by the monomial basis of
:class:`FockBasis`.  Every operator in this package maps a block to a single
block, which keeps application a sparse matrix product.

Charges are tuples of ints or :class:`fractions.Fraction` (shifted sectors).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from . import lattice
from .scalars import GroupElement, group_power

PRUNE_TOL = 1e-14
DENSE_FRACTION = 0.05

Monomial = Tuple[Tuple[int, int], ...]
Charge = Tuple
BlockKey = Tuple[Charge, int]


@dataclass(frozen=True)
class TruncationConfig:
    """Cutoffs for the truncated space.

    ``cutoff`` bounds the oscillator degree of vectors we report on,
    ``intermediate_cutoff`` bounds every intermediate result; anything above
    it is dropped and the result is flagged inexact.  ``charge_window``
    bounds |coordinates| of charges reached by the sector checks and by
    :func:`group_algebra_apply`.  ``probe_radius`` bounds the charges used as
    probe states in operator identities.
    """

    cutoff: int = 6
    intermediate_cutoff: int = 10
    charge_window: int = 4
    tol: float = 1e-9
    probe_radius: int = 1

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        if self.intermediate_cutoff < self.cutoff:
            raise ValueError("intermediate cutoff must be >= cutoff")
        if self.charge_window < 0 or self.probe_radius < 0:
            raise ValueError("charge bounds must be non-negative")


def normalize_charge(beta: Iterable) -> Charge:
    out = []
    for x in beta:
        if isinstance(x, Fraction) and x.denominator == 1:
            x = int(x)
        elif isinstance(x, float) and x.is_integer():
            x = int(x)
        out.append(x)
    return tuple(out)


# ----------------------------------------------------------------------------
# monomial basis

def _colored_partitions(d: int, M: int, max_part: Tuple[int, int]) -> List[List[Tuple[int, int]]]:
    """Multisets of parts (k, s) with sum k = d, parts nonincreasing in (k, s)."""
    if d == 0:
        return [[]]
    out = []
    kmax, smax = max_part
    for k in range(min(d, kmax), 0, -1):
        top = smax if k == kmax else M - 1
        for s in range(top, -1, -1):
            for rest in _colored_partitions(d - k, M, (k, s)):
                out.append([(k, s)] + rest)
    return out


class FockBasis:
    """Monomials in the oscillators e_s(-k), slot ``s`` 0-based, ``k >= 1``.

    A monomial is a sorted tuple of ``(s, k)`` pairs with repetition.
    """

    def __init__(self, M: int):
        if M < 1:
            raise ValueError("need at least one slot")
        self.M = M
        self._mono: Dict[int, List[Monomial]] = {}
        self._index: Dict[int, Dict[Monomial, int]] = {}
        self._mult: Dict[tuple, sp.csr_matrix] = {}
        self._ann: Dict[tuple, sp.csr_matrix] = {}

    def monomials(self, d: int) -> List[Monomial]:
        if d < 0:
            return []
        if d not in self._mono:
            parts = _colored_partitions(d, self.M, (d, self.M - 1))
            monos = sorted(tuple(sorted((s, k) for k, s in p)) for p in parts)
            self._mono[d] = monos
            self._index[d] = {m: i for i, m in enumerate(monos)}
        return self._mono[d]

    def index(self, d: int) -> Dict[Monomial, int]:
        self.monomials(d)
        return self._index[d]

    def dim(self, d: int) -> int:
        return len(self.monomials(d))

    def mult(self, s: int, k: int, d: int) -> sp.csr_matrix:
        """Multiplication by e_s(-k): degree d -> d + k."""
        key = (s, k, d)
        if key not in self._mult:
            idx = self.index(d + k)
            rows, cols = [], []
            for c, m in enumerate(self.monomials(d)):
                rows.append(idx[tuple(sorted(m + ((s, k),)))])
                cols.append(c)
            self._mult[key] = sp.csr_matrix(
                (np.ones(len(rows), dtype=complex), (rows, cols)),
                shape=(self.dim(d + k), self.dim(d)))
        return self._mult[key]

    def ann(self, s: int, k: int, d: int) -> sp.csr_matrix:
        """e_s(k) = k * d/d e_s(-k): degree d -> d - k."""
        key = (s, k, d)
        if key not in self._ann:
            rows, cols, vals = [], [], []
            if d - k >= 0:
                idx = self.index(d - k)
                for c, m in enumerate(self.monomials(d)):
                    mult = m.count((s, k))
                    if mult:
                        lst = list(m)
                        lst.remove((s, k))
                        rows.append(idx[tuple(lst)])
                        cols.append(c)
                        vals.append(k * mult)
            self._ann[key] = sp.csr_matrix(
                (np.asarray(vals, dtype=complex), (rows, cols)),
                shape=(max(self.dim(d - k), 0), self.dim(d)))
        return self._ann[key]


@lru_cache(maxsize=None)
def fock_basis(M: int) -> FockBasis:
    return FockBasis(M)


def oscillator_degree(mono: Monomial) -> int:
    return sum(k for _, k in mono)


def degree(mono: Monomial, charge: Sequence) -> Fraction:
    """Eigenvalue of d_0: minus the oscillator degree minus (beta, beta)/2."""
    return Fraction(-oscillator_degree(mono)) - Fraction(lattice.inner(charge, charge)) / 2


# ----------------------------------------------------------------------------
# vectors

@dataclass
class FockVector:
    """Finite linear combination of basis states, stored per block."""

    M: int
    blocks: Dict[BlockKey, np.ndarray] = field(default_factory=dict)
    clipped: bool = False

    @classmethod
    def zero(cls, M: int) -> "FockVector":
        return cls(M)

    @classmethod
    def basis_state(cls, M: int, oscillators: Sequence[Tuple[int, int]] = (),
                    charge: Optional[Sequence] = None, coeff: complex = 1.0) -> "FockVector":
        """State from 1-based ``(slot, k)`` oscillators e_slot(-k) and a charge."""
        charge = normalize_charge(charge if charge is not None else (0,) * M)
        if len(charge) != M:
            raise ValueError("charge has wrong length")
        mono = tuple(sorted((s - 1, k) for s, k in oscillators))
        if any(not (0 <= s < M) or k < 1 for s, k in mono):
            raise ValueError("bad oscillator label")
        basis = fock_basis(M)
        d = oscillator_degree(mono)
        vec = np.zeros(basis.dim(d), dtype=complex)
        vec[basis.index(d)[mono]] = coeff
        return cls(M, {(charge, d): vec})

    @classmethod
    def vacuum(cls, M: int, charge: Optional[Sequence] = None) -> "FockVector":
        return cls.basis_state(M, (), charge)

    def copy(self) -> "FockVector":
        return FockVector(self.M, {k: v.copy() for k, v in self.blocks.items()}, self.clipped)

    def add_block(self, key: BlockKey, vec: np.ndarray):
        if key in self.blocks:
            self.blocks[key] = self.blocks[key] + vec
        else:
            self.blocks[key] = np.array(vec, dtype=complex)

    def __add__(self, other: "FockVector") -> "FockVector":
        out = self.copy()
        for k, v in other.blocks.items():
            out.add_block(k, v)
        out.clipped = self.clipped or other.clipped
        return out

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scaled(-1)

    def scaled(self, c: complex) -> "FockVector":
        return FockVector(self.M, {k: c * v for k, v in self.blocks.items()}, self.clipped)

    def __rmul__(self, c):
        return self.scaled(c)

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(v))) for v in self.blocks.values() if v.size),
                   default=0.0)

    def distance(self, other: "FockVector") -> float:
        return (self - other).max_abs()

    def terms(self) -> Dict[Tuple[Monomial, Charge], complex]:
        """Nonzero coefficients keyed by (1-based oscillators, charge)."""
        basis = fock_basis(self.M)
        out = {}
        for (charge, d), vec in self.blocks.items():
            monos = basis.monomials(d)
            for i in np.nonzero(np.abs(vec) > PRUNE_TOL)[0]:
                mono = tuple((s + 1, k) for s, k in monos[i])
                out[(mono, charge)] = complex(vec[i])
        return out

    def coefficient(self, oscillators: Sequence[Tuple[int, int]], charge: Sequence) -> complex:
        mono = tuple(sorted((s - 1, k) for s, k in oscillators))
        d = oscillator_degree(mono)
        key = (normalize_charge(charge), d)
        if key not in self.blocks:
            return 0j
        return complex(self.blocks[key][fock_basis(self.M).index(d)[mono]])

    def pruned(self) -> "FockVector":
        out = FockVector(self.M, clipped=self.clipped)
        for k, v in self.blocks.items():
            w = np.where(np.abs(v) > PRUNE_TOL, v, 0)
            if np.any(w):
                out.blocks[k] = w
        return out


# ----------------------------------------------------------------------------
# exponential kernels E^-(...) E^+(...)

class ExpKernel:
    """Product of creation and annihilation exponentials on oscillator blocks.

    ``create`` and ``annihilate`` are lists of ``(alpha, a)`` pairs standing
    for E^-(alpha, a z) and E^+(alpha, a z).  The z^p coefficient of the
    creation part is S_p and the z^(-r) coefficient of the annihilation part
    is T_r; both follow the recurrence p F_p = sum_k k g_k F_(p-k) for
    exponentials of commuting operators.
    """

    def __init__(self, M: int, create: Sequence, annihilate: Sequence):
        self.M = M
        self.basis = fock_basis(M)
        self.create = [(np.asarray(a, dtype=complex), complex(s)) for a, s in create]
        self.annihilate = [(np.asarray(a, dtype=complex), complex(s)) for a, s in annihilate]
        self._S: Dict[tuple, sp.csr_matrix] = {}
        self._T: Dict[tuple, sp.csr_matrix] = {}
        self._K: Dict[tuple, sp.csr_matrix] = {}
        self._Kop: Dict[tuple, object] = {}

    def _create_coeff(self, m: int) -> np.ndarray:
        v = np.zeros(self.M, dtype=complex)
        for alpha, a in self.create:
            v -= (a ** m / m) * alpha
        return v

    def _ann_coeff(self, m: int) -> np.ndarray:
        v = np.zeros(self.M, dtype=complex)
        for alpha, a in self.annihilate:
            v += (a ** (-m) / m) * alpha
        return v

    def _g(self, m: int, d: int) -> sp.csr_matrix:
        c = self._create_coeff(m)
        out = sp.csr_matrix((self.basis.dim(d + m), self.basis.dim(d)), dtype=complex)
        for s in range(self.M):
            if c[s] != 0:
                out = out + c[s] * self.basis.mult(s, m, d)
        return out

    def _h(self, m: int, d: int) -> sp.csr_matrix:
        c = self._ann_coeff(m)
        out = sp.csr_matrix((self.basis.dim(d - m), self.basis.dim(d)), dtype=complex)
        for s in range(self.M):
            if c[s] != 0:
                out = out + c[s] * self.basis.ann(s, m, d)
        return out

    def S(self, p: int, d: int) -> sp.csr_matrix:
        """Creation coefficient at z^p: degree d -> d + p."""
        key = (p, d)
        if key not in self._S:
            if p == 0:
                m = sp.identity(self.basis.dim(d), dtype=complex, format="csr")
            else:
                m = sp.csr_matrix((self.basis.dim(d + p), self.basis.dim(d)), dtype=complex)
                for k in range(1, p + 1):
                    m = m + k * (self._g(k, d + p - k) @ self.S(p - k, d))
                m = (m / p).tocsr()
                m.eliminate_zeros()
            self._S[key] = m
        return self._S[key]

    def T(self, r: int, d: int) -> sp.csr_matrix:
        """Annihilation coefficient at z^(-r): degree d -> d - r."""
        key = (r, d)
        if key not in self._T:
            if r == 0:
                m = sp.identity(self.basis.dim(d), dtype=complex, format="csr")
            else:
                m = sp.csr_matrix((self.basis.dim(d - r), self.basis.dim(d)), dtype=complex)
                for k in range(1, r + 1):
                    m = m + k * (self._h(k, d - r + k) @ self.T(r - k, d))
                m = (m / r).tocsr()
                m.eliminate_zeros()
            self._T[key] = m
        return self._T[key]

    def K(self, c: int, d: int) -> sp.csr_matrix:
        """Coefficient of z^c in E^- E^+ restricted to degree d: d -> d + c."""
        key = (c, d)
        if key not in self._K:
            if d + c < 0:
                m = sp.csr_matrix((0, self.basis.dim(d)), dtype=complex)
            else:
                m = sp.csr_matrix((self.basis.dim(d + c), self.basis.dim(d)), dtype=complex)
                for r in range(max(0, -c), d + 1):
                    m = m + self.S(c + r, d - r) @ self.T(r, d)
                m = m.tocsr()
            self._K[key] = m
        return self._K[key]


    def K_op(self, c: int, d: int):
        """K(c, d) as a dense array when that multiplies faster."""
        key = (c, d)
        if key not in self._Kop:
            m = self.K(c, d)
            size = m.shape[0] * m.shape[1]
            self._Kop[key] = m.toarray() if size and m.nnz > DENSE_FRACTION * size else m
        return self._Kop[key]


def _kernel_key(pairs) -> tuple:
    return tuple((tuple(complex(x) for x in a), complex(s)) for a, s in pairs)


_KERNELS: Dict[tuple, ExpKernel] = {}


def exp_kernel(M: int, create: Sequence, annihilate: Sequence) -> ExpKernel:
    """Shared kernel instance for the given profile."""
    key = (M, _kernel_key(create), _kernel_key(annihilate))
    k = _KERNELS.get(key)
    if k is None:
        k = ExpKernel(M, create, annihilate)
        _KERNELS[key] = k
    return k


def clear_caches():
    _KERNELS.clear()
    fock_basis.cache_clear()


# ----------------------------------------------------------------------------
# basic actions

def heisenberg_block(i: int, k: int, charge: Charge, d: int, X: np.ndarray, M: int):
    """e_i(k) on a block; returns (target degree, array) or None when zero."""
    basis = fock_basis(M)
    if k > 0:
        if d - k < 0:
            return None
        return d - k, basis.ann(i - 1, k, d) @ X
    if k < 0:
        return d - k, basis.mult(i - 1, -k, d) @ X
    return d, complex(charge[i - 1]) * X


def heisenberg_apply(i: int, k: int, v: FockVector) -> FockVector:
    """Action of e_i(k): derivative for k > 0, product for k < 0, charge for k = 0."""
    out = FockVector(v.M, clipped=v.clipped)
    for (charge, d), vec in v.blocks.items():
        res = heisenberg_block(i, k, charge, d, vec, v.M)
        if res is not None:
            out.add_block((charge, res[0]), res[1])
    return out


def heisenberg_commutator_check(alpha: Sequence, k: int, beta: Sequence, l: int,
                                sample: FockVector, config: TruncationConfig) -> Optional[float]:
    """Deviation of [alpha(k), beta(l)] from k (alpha, beta) delta_(k+l,0) on a sample.

    Returns None if the sample is not safe for the cutoff.
    """
    top = max((d for _, d in sample.blocks), default=0)
    if top + abs(k) + abs(l) > config.cutoff:
        return None

    def op(vec, coeffs, mode):
        out = FockVector(vec.M)
        for i, c in enumerate(coeffs, start=1):
            if c != 0:
                out = out + heisenberg_apply(i, mode, vec).scaled(c)
        return out

    lhs = op(op(sample, beta, l), alpha, k) - op(op(sample, alpha, k), beta, l)
    rhs = sample.scaled(k * lattice.inner(alpha, beta) if k + l == 0 else 0)
    return lhs.distance(rhs)


def group_algebra_apply(alpha: Sequence, v: FockVector,
                        config: Optional[TruncationConfig] = None) -> FockVector:
    """e^alpha: shift every charge by alpha with the cocycle sign eps(alpha, beta)."""
    out = FockVector(v.M, clipped=v.clipped)
    for (charge, d), vec in v.blocks.items():
        new = normalize_charge(lattice.add(alpha, charge))
        if config is not None and any(abs(x) > config.charge_window for x in new):
            out.clipped = True
            continue
        out.add_block((new, d), lattice.cocycle(alpha, charge) * vec)
    return out


def power_apply(alpha: Sequence, a, v: FockVector):
    """a^alpha acting by a^((alpha, beta)) on each charge sector.

    ``a`` is a :class:`GroupElement` (branch-fixed power) or the string
    ``"z"``, in which case a dict from exponent to the unchanged sector
    vector is returned.
    """
    if isinstance(a, str):
        if a != "z":
            raise ValueError("formal variable must be 'z'")
        out: Dict[object, FockVector] = {}
        for (charge, d), vec in v.blocks.items():
            e = lattice.inner(alpha, charge)
            out.setdefault(e, FockVector(v.M)).add_block((charge, d), vec)
        return out
    out = FockVector(v.M, clipped=v.clipped)
    for (charge, d), vec in v.blocks.items():
        e = lattice.inner(alpha, charge)
        if isinstance(a, GroupElement):
            f = group_power(a, e)
        else:
            f = complex(a) ** e
        out.add_block((charge, d), f * vec)
    return out


@dataclass
class SeriesResult:
    """Coefficients of a formal series in z applied to a vector.

    ``coefficients`` maps the z-exponent (int or Fraction) to a vector and
    ``exact`` maps it to whether nothing was dropped by the cutoff.
    """

    coefficients: Dict[object, FockVector] = field(default_factory=dict)
    exact: Dict[object, bool] = field(default_factory=dict)

    def coefficient(self, e, M: int) -> FockVector:
        return self.coefficients.get(e, FockVector(M))


def exp_series_apply(alpha: Sequence, a, sign: int, v: FockVector,
                     config: TruncationConfig) -> SeriesResult:
    """Coefficients of E^+(alpha, a z) (sign > 0) or E^-(alpha, a z) (sign < 0) on v.

    ``a`` is a GroupElement or a nonzero complex number.  The annihilation
    series is finite on v.  The creation series is returned for every z^p
    whose output degree stays within the intermediate cutoff.
    """
    aval = a.value() if isinstance(a, GroupElement) else complex(a)
    res = SeriesResult()
    if sign > 0:
        ker = exp_kernel(v.M, [], [(alpha, aval)])
        for (charge, d), vec in v.blocks.items():
            for r in range(d + 1):
                res.coefficients.setdefault(-r, FockVector(v.M)).add_block(
                    (charge, d - r), ker.T(r, d) @ vec)
                res.exact[-r] = not v.clipped
    else:
        ker = exp_kernel(v.M, [(alpha, aval)], [])
        top = max((d for _, d in v.blocks), default=0)
        for p in range(config.intermediate_cutoff - top + 1):
            out = res.coefficients.setdefault(p, FockVector(v.M))
            for (charge, d), vec in v.blocks.items():
                out.add_block((charge, d + p), ker.S(p, d) @ vec)
            res.exact[p] = not v.clipped
    return res


def d0_apply(v: FockVector) -> FockVector:
    """The degree operator, diagonal on basis states."""
    out = FockVector(v.M, clipped=v.clipped)
    for (charge, d), vec in v.blocks.items():
        out.add_block((charge, d), complex(-d - Fraction(lattice.inner(charge, charge)) / 2) * vec)
    return out


def window_blocks(M: int, config: TruncationConfig, charges: Optional[Iterable] = None,
                  max_degree: Optional[int] = None) -> List[BlockKey]:
    """Probe blocks: charges within the probe radius, degrees up to the cutoff."""
    if charges is None:
        charges = lattice.box(M, config.probe_radius)
    top = config.cutoff if max_degree is None else max_degree
    return [(normalize_charge(c), d) for c in charges for d in range(top + 1)]


def random_vector(M: int, blocks: Sequence[BlockKey], rng: np.random.Generator,
                  density: float = 0.3) -> FockVector:
    """Random combination with coefficients in {+-1, +-i, 1+-i}."""
    choices = np.array([1, -1, 1j, -1j, 1 + 1j, 1 - 1j])
    basis = fock_basis(M)
    v = FockVector(M)
    for key in blocks:
        n = basis.dim(key[1])
        mask = rng.random(n) < density
        vals = np.where(mask, rng.choice(choices, size=n), 0).astype(complex)
        if np.any(vals):
            v.add_block(key, vals)
    return v
