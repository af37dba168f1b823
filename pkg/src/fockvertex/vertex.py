"""Vertex operators X(alpha, z), the normal-ordered fields X_ij and their modes.

Each mode operator maps one (charge, oscillator degree) block to one block.
``target`` predicts that block without doing any linear algebra, so callers
can drop work that would leave the intermediate cutoff.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import lattice
from .fock import (FockVector, SeriesResult, TruncationConfig, exp_kernel,
                   fock_basis, normalize_charge)
from .scalars import GroupElement, group_power

log = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def _frac(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 6)
    return Fraction(x)


def _as_int(x) -> Optional[int]:
    f = _frac(x)
    return int(f) if f.denominator == 1 else None


class ModeOperator:
    """A homogeneous operator: one input block goes to one output block."""

    family = "abstract"
    M: int

    def shift(self) -> tuple:
        raise NotImplementedError

    def target(self, charge, d: int) -> Optional[Tuple[tuple, int]]:
        """Output block, or None if the operator is zero on this block."""
        raise NotImplementedError

    def block(self, charge, d: int, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply(self, v: FockVector, config: TruncationConfig) -> FockVector:
        return OpExpr.of(self).apply(v, config)

    def __mul__(self, other):
        return OpExpr.of(self) * other

    def __add__(self, other):
        return OpExpr.of(self) + other

    def __sub__(self, other):
        return OpExpr.of(self) - other

    def __rmul__(self, c):
        return OpExpr.of(self).scaled(c)


class HeisenbergMode(ModeOperator):
    """e_i(k) (1-based slot)."""

    family = "heisenberg"

    def __init__(self, M: int, i: int, k: int):
        self.M, self.i, self.k = M, i, int(k)

    def shift(self):
        return (0,) * self.M

    def target(self, charge, d):
        if d - self.k < 0:
            return None
        return charge, d - self.k

    def block(self, charge, d, X):
        basis = fock_basis(self.M)
        if self.k > 0:
            return basis.ann(self.i - 1, self.k, d) @ X
        if self.k < 0:
            return basis.mult(self.i - 1, -self.k, d) @ X
        return complex(charge[self.i - 1]) * X

    def __repr__(self):
        return f"e_{self.i}({self.k})"


class LatticeMode(ModeOperator):
    """x_k(alpha), the z^(-k) coefficient of X(alpha, z)."""

    family = "X_alpha"

    def __init__(self, M: int, alpha: Sequence, k):
        self.M = M
        self.alpha = normalize_charge(alpha)
        if len(self.alpha) != M:
            raise ValueError("alpha has wrong length")
        self.k = _frac(k)
        self.kernel = exp_kernel(M, [(lattice.scale(-1, self.alpha), 1)],
                                 [(lattice.scale(-1, self.alpha), 1)])

    def shift(self):
        return self.alpha

    def _offset(self, charge) -> Fraction:
        al = self.alpha
        return _frac(lattice.inner(al, charge)) + _frac(lattice.inner(al, al)) / 2

    def target(self, charge, d):
        c = _as_int(-self.k - self._offset(charge))
        if c is None:
            log.debug("mode %s outside support on charge %s", self.k, charge)
            return None
        if d + c < 0:
            return None
        return normalize_charge(lattice.add(self.alpha, charge)), d + c

    def block(self, charge, d, X):
        c = _as_int(-self.k - self._offset(charge))
        return lattice.cocycle(self.alpha, charge) * (self.kernel.K_op(c, d) @ X)

    def __repr__(self):
        return f"x_{self.k}({self.alpha})"


class PairMode(ModeOperator):
    """x_ij(k, a, b): mode k of X_ij(a^-1 b, a z), with X_ij from its closed form.

    With ``a`` the identity this is mode k of X_ij(b, z).
    """

    family = "X_ij"

    def __init__(self, M: int, i: int, j: int, a: GroupElement, b: GroupElement, k: int):
        if not (1 <= i <= M and 1 <= j <= M):
            raise ValueError("index out of range")
        self.M, self.i, self.j, self.a, self.b = M, i, j, a, b
        k_int = _as_int(k)
        if k_int is None:
            raise ValueError("X_ij modes are integral")
        self.k = k_int
        self.A = a.inverse() * b
        self.scale = complex(a.value() ** (-self.k))
        Aval = self.A.value()
        ei, ej = lattice.unit(i, M), lattice.unit(j, M)
        self.heisenberg = i == j and self.A.is_identity()
        if not self.heisenberg:
            self.kernel = exp_kernel(M, [(lattice.scale(-1, ei), 1), (ej, Aval)],
                                     [(lattice.scale(-1, ei), 1), (ej, Aval)])
        self.half = group_power(self.A, HALF)
        self._shift = normalize_charge(lattice.sub(ei, ej))

    def shift(self):
        return self._shift

    def _offset(self, charge) -> Optional[int]:
        if self.i == self.j:
            return 0
        return _as_int(1 + _frac(charge[self.i - 1]) - _frac(charge[self.j - 1]))

    def target(self, charge, d):
        e = self._offset(charge)
        if e is None:
            log.debug("x_%d%d off the sector lattice at %s", self.i, self.j, charge)
            return None
        c = -self.k - e
        if d + c < 0:
            return None
        return normalize_charge(lattice.add(self._shift, charge)), d + c

    def prefactor(self, charge) -> complex:
        i, j, M = self.i, self.j, self.M
        if i != j:
            ei, ej = lattice.unit(i, M), lattice.unit(j, M)
            return (lattice.cocycle(ei, ej) * lattice.cocycle(self._shift, charge)
                    * self.half * group_power(self.A, -_frac(charge[j - 1])))
        return self.half / (1 - self.A.value()) * group_power(self.A, -_frac(charge[i - 1]))

    def block(self, charge, d, X):
        if self.heisenberg:
            return self.scale * HeisenbergMode(self.M, self.i, self.k).block(charge, d, X)
        c = -self.k - self._offset(charge)
        out = self.prefactor(charge) * (self.kernel.K_op(c, d) @ X)
        if self.i == self.j and self.k == 0:
            out = out - self.half / (1 - self.A.value()) * X
        return self.scale * out

    def __repr__(self):
        return f"x_{self.i}{self.j}({self.k}, {self.a}, {self.b})"


class SumMode(ModeOperator):
    """Linear combination of mode operators sharing one charge shift."""

    family = "sum"

    def __init__(self, terms: List[Tuple[complex, ModeOperator]], name: str = "sum"):
        if not terms:
            raise ValueError("empty sum")
        self.terms = terms
        self.M = terms[0][1].M
        self.name = name
        self._shift = terms[0][1].shift()

    def shift(self):
        return self._shift

    def target(self, charge, d):
        for _, op in self.terms:
            t = op.target(charge, d)
            if t is not None:
                return t
        return None

    def block(self, charge, d, X):
        tgt = self.target(charge, d)
        basis = fock_basis(self.M)
        out = np.zeros((basis.dim(tgt[1]), X.shape[1]), dtype=complex)
        for c, op in self.terms:
            t = op.target(charge, d)
            if t is None:
                continue
            if t != tgt:
                raise ValueError("summands map to different blocks")
            out += c * op.block(charge, d, X)
        return out

    def __repr__(self):
        return self.name


def y_operator(M: int, a: GroupElement, b: GroupElement, m: int) -> SumMode:
    """y(m, a, b) = sum_k x_kk(m, a, b)."""
    return SumMode([(1.0, PairMode(M, k, k, a, b, m)) for k in range(1, M + 1)],
                   name=f"y({m}, {a}, {b})")


# ----------------------------------------------------------------------------
# operator expressions

class OpExpr:
    """Sum of coefficient * (product of mode operators); ``()`` is the identity.

    A product ``(A, B)`` means A after B.
    """

    def __init__(self, terms=None):
        self.terms: List[Tuple[complex, Tuple[ModeOperator, ...]]] = list(terms or [])

    @classmethod
    def of(cls, op) -> "OpExpr":
        if isinstance(op, OpExpr):
            return op
        return cls([(1.0, (op,))])

    @classmethod
    def identity(cls, c: complex = 1.0) -> "OpExpr":
        return cls([(c, ())])

    def scaled(self, c) -> "OpExpr":
        return OpExpr([(c * a, p) for a, p in self.terms])

    def __add__(self, other) -> "OpExpr":
        return OpExpr(self.terms + OpExpr.of(other).terms)

    def __sub__(self, other) -> "OpExpr":
        return self + OpExpr.of(other).scaled(-1)

    def __mul__(self, other) -> "OpExpr":
        if isinstance(other, (int, float, complex)):
            return self.scaled(other)
        other = OpExpr.of(other)
        return OpExpr([(a * b, p + q) for a, p in self.terms for b, q in other.terms])

    def __rmul__(self, c) -> "OpExpr":
        return self.scaled(c)

    def apply_block(self, charge, d: int, X: np.ndarray, config: TruncationConfig,
                    stats: Optional[dict] = None):
        """Apply to the columns of X living in block (charge, d).

        Returns ``(blocks, exact)`` where ``blocks`` maps output block keys to
        arrays and ``exact`` is False if any product left the cutoff.  If
        ``stats`` is given, ``stats["peak"]`` tracks the largest entry of any
        single product term, the scale against which roundoff is judged.
        """
        exact = True
        out: Dict[tuple, np.ndarray] = {}
        for coeff, prod in self.terms:
            if coeff == 0:
                continue
            ch, dd, Y = charge, d, X
            zero = False
            for op in reversed(prod):
                t = op.target(ch, dd)
                if t is None:
                    zero = True
                    break
                if t[1] > config.intermediate_cutoff:
                    exact = False
                    zero = True
                    break
                if getattr(op, "uses_config", False):
                    Y, ok = op.block_checked(ch, dd, Y, config)
                    exact = exact and ok
                else:
                    Y = op.block(ch, dd, Y)
                ch, dd = t
            if zero:
                continue
            key = (ch, dd)
            if stats is not None and Y.size:
                stats["peak"] = max(stats.get("peak", 0.0), abs(coeff) * float(np.max(np.abs(Y))))
            out[key] = out[key] + coeff * Y if key in out else coeff * Y
        return out, exact

    def apply(self, v: FockVector, config: TruncationConfig) -> FockVector:
        out = FockVector(v.M, clipped=v.clipped)
        for (charge, d), vec in v.blocks.items():
            blocks, exact = self.apply_block(charge, d, vec[:, None], config)
            if not exact:
                out.clipped = True
            for key, Y in blocks.items():
                out.add_block(key, Y[:, 0])
        return out


def commutator(A, B) -> OpExpr:
    A, B = OpExpr.of(A), OpExpr.of(B)
    return A * B - B * A


def anticommutator(A, B) -> OpExpr:
    A, B = OpExpr.of(A), OpExpr.of(B)
    return A * B + B * A


# ----------------------------------------------------------------------------
# public helpers

def x_alpha_apply(alpha: Sequence, k, v: FockVector, config: TruncationConfig) -> FockVector:
    """Mode x_k(alpha) applied to v."""
    return LatticeMode(v.M, alpha, k).apply(v, config)


def window_deviation(expr: OpExpr, blocks, config: TruncationConfig,
                     M: int, stats: Optional[dict] = None) -> Tuple[float, int, int]:
    """Max |expr . v| over all basis states v in ``blocks``.

    Returns (max deviation over exact blocks, exact block count, skipped count).
    ``stats`` is passed through to :meth:`OpExpr.apply_block`.
    """
    basis = fock_basis(M)
    worst, n_exact, n_skip = 0.0, 0, 0
    for charge, d in blocks:
        X = np.eye(basis.dim(d), dtype=complex)
        out, exact = expr.apply_block(normalize_charge(charge), d, X, config, stats)
        if not exact:
            n_skip += 1
            continue
        n_exact += 1
        for Y in out.values():
            if Y.size:
                worst = max(worst, float(np.max(np.abs(Y))))
    return worst, n_exact, n_skip


def clifford_anticommutator(alpha: Sequence, k, l, blocks,
                            config: TruncationConfig) -> Dict[str, float]:
    """Deviations of the three Clifford relations for x_k(alpha), x_l(+-alpha).

    Keys: ``"mixed"`` for {x_k(a), x_-l(-a)} - delta_kl, ``"plus"`` for
    {x_k(a), x_l(a)}, ``"minus"`` for {x_k(-a), x_l(-a)}.  Values are None when
    no block was exact.
    """
    alpha = normalize_charge(alpha)
    if lattice.inner(alpha, alpha) != 1:
        raise ValueError("need (alpha, alpha) = 1")
    k, l = _frac(k), _frac(l)
    if k.denominator != 2 or l.denominator != 2:
        raise ValueError("modes must lie in Z + 1/2")
    M = len(alpha)
    neg = lattice.scale(-1, alpha)
    exprs = {
        "mixed": anticommutator(LatticeMode(M, alpha, k), LatticeMode(M, neg, -l))
        - OpExpr.identity(1.0 if k == l else 0.0),
        "plus": anticommutator(LatticeMode(M, alpha, k), LatticeMode(M, alpha, l)),
        "minus": anticommutator(LatticeMode(M, neg, k), LatticeMode(M, neg, l)),
    }
    out = {}
    for name, expr in exprs.items():
        dev, n_exact, _ = window_deviation(expr, blocks, config, M)
        out[name] = dev if n_exact else None
    return out


def pair_mode(M: int, i: int, j: int, A: GroupElement, k: int) -> PairMode:
    """Mode k of X_ij(A, z)."""
    return PairMode(M, i, j, A.group.identity(), A, k)


def x_ij_series(i: int, j: int, a: GroupElement, v: FockVector,
                config: TruncationConfig) -> SeriesResult:
    """All nonzero z-coefficients of X_ij(a, z) . v (key is the z exponent -k)."""
    res = SeriesResult()
    lo = -config.intermediate_cutoff - 2 * config.charge_window - 2
    hi = config.intermediate_cutoff + 2 * config.charge_window + 2
    for k in range(lo, hi + 1):
        w = pair_mode(v.M, i, j, a, k).apply(v, config)
        if w.blocks or w.clipped:
            res.coefficients[-k] = w
            res.exact[-k] = not w.clipped
    return res


def x_ij_param_mode(i: int, j: int, a: GroupElement, b: GroupElement, k: int,
                    v: FockVector, config: TruncationConfig) -> FockVector:
    return PairMode(v.M, i, j, a, b, k).apply(v, config)


def y_mode(a: GroupElement, b: GroupElement, m: int, v: FockVector,
           config: TruncationConfig) -> FockVector:
    return y_operator(v.M, a, b, m).apply(v, config)


# ----------------------------------------------------------------------------
# independent route: normal-ordered products of lattice modes

class NormalOrderedMode(ModeOperator):
    """Mode k of :X(e_i, z) X(-e_j, a z): summed from lattice modes.

    The product of modes is reordered with the Clifford relations whenever
    that keeps the intermediate degree lower, and terms are dropped once the
    rightmost factor kills the block.
    """

    family = "normal_ordered"
    uses_config = True

    def __init__(self, M: int, i: int, j: int, a: GroupElement, k: int):
        self.M, self.i, self.j, self.a, self.k = M, i, j, a, int(k)
        self.ei, self.mej = lattice.unit(i, M), lattice.scale(-1, lattice.unit(j, M))
        self._shift = normalize_charge(lattice.add(self.ei, self.mej))

    def shift(self):
        return self._shift

    def target(self, charge, d):
        e = 0 if self.i == self.j else 1 + _frac(charge[self.i - 1]) - _frac(charge[self.j - 1])
        c = _as_int(-self.k - e)
        if c is None or d + c < 0:
            return None
        return normalize_charge(lattice.add(self._shift, charge)), d + c

    def _k1_range(self, charge, d):
        """Mode pairs (k1, k2) that can contribute on a block."""
        e1 = _frac(charge[self.i - 1]) + HALF
        e2 = -_frac(charge[self.j - 1]) + HALF
        # x_k2(-e_j) kills the block once k2 > d - e2, x_k1(e_i) once k1 > d - e1
        k1 = self.k - (d - e2)
        while k1 > 0:
            k1 -= 1
        top = max(d - e1, 0)
        while k1 <= top + 1:
            yield k1, self.k - k1
            k1 += 1

    def block(self, charge, d, X):
        raise NotImplementedError("needs a cutoff; use block_checked")

    def block_checked(self, charge, d, X, config: TruncationConfig):
        """Returns (array, exact)."""
        tgt = self.target(charge, d)
        basis = fock_basis(self.M)
        acc = np.zeros((basis.dim(tgt[1]), X.shape[1]), dtype=complex)
        exact = True
        for k1, k2 in self._k1_range(charge, d):
            A1 = LatticeMode(self.M, self.ei, k1)
            A2 = LatticeMode(self.M, self.mej, k2)
            coeff = group_power(self.a, -k2)
            pair = self.i == self.j and k1 + k2 == 0
            t1, t2 = A1.target(charge, d), A2.target(charge, d)
            if t2 is None:
                if pair and k1 > 0:
                    acc -= coeff * X
                continue
            if t1 is None:
                # x_k1 x_k2 = -x_k2 x_k1 + delta for a matched pair
                if pair and k1 < 0:
                    acc += coeff * X
                continue
            if t1[1] < t2[1]:
                expr = OpExpr([(-1.0, (A2, A1))])
                if pair and k1 < 0:
                    expr = expr + OpExpr.identity(1.0)
            else:
                expr = OpExpr([(1.0, (A1, A2))])
                if pair and k1 > 0:
                    expr = expr - OpExpr.identity(1.0)
            blocks, ok = expr.apply_block(charge, d, X, config)
            exact = exact and ok
            for key, Y in blocks.items():
                if key != tgt:
                    raise ValueError("normal-ordered term left the expected block")
                acc += coeff * Y
        return acc, exact


def normal_ordered_apply(i: int, j: int, a: GroupElement, k: int, v: FockVector,
                         config: TruncationConfig) -> FockVector:
    """Mode k of :X(e_i,z)X(-e_j,az): applied to v via lattice modes."""
    return NormalOrderedMode(v.M, i, j, a, k).apply(v, config)
