"""
Exact arithmetic in Z[xi_q]

Elements are integer coefficient vectors over the redundant power basis
1, xi, ..., xi^(q-1). Addition and multiplication stay cyclic convolutions;
equality and rationality are decided by reducing modulo the q-th cyclotomic
polynomial, whose remainder is the canonical form.
"""

import logging
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import ZZ, Poly, Symbol, cyclotomic_poly

from .errors import ConsistencyError, ErrorType, ModulusMismatchError, require
from .ntheory import Modulus, ModulusLike

logger = logging.getLogger(__name__)

_X = Symbol("x")


class CyclotomicPolynomialCache:
    """Phi_q as a sympy Poly over ZZ, built once per modulus."""

    def __init__(self):
        self._polys: Dict[int, Poly] = {}
        self._lock = threading.Lock()

    def poly(self, q: int) -> Poly:
        poly = self._polys.get(q)
        if poly is not None:
            return poly
        with self._lock:
            poly = self._polys.get(q)
            if poly is None:
                poly = cyclotomic_poly(q, _X, polys=True)
                # published only once fully built
                self._polys[q] = poly
                logger.debug(f"Built cyclotomic polynomial for q={q} (degree {poly.degree()})")
        return poly

    def get(self, q: int) -> Tuple[int, ...]:
        """Coefficients, lowest degree first."""
        return tuple(int(c) for c in reversed(self.poly(q).all_coeffs()))

    def degree(self, q: int) -> int:
        return self.poly(q).degree()

    def clear(self):
        with self._lock:
            self._polys = {}


# Global cache instance
phi_cache = CyclotomicPolynomialCache()


@lru_cache(maxsize=65536)
def _reduce(q: int, coeffs: Tuple[int, ...]) -> Tuple[int, ...]:
    """Remainder modulo Phi_q, lowest degree first, padded to deg Phi_q."""
    phi = phi_cache.poly(q)
    rem = Poly(coeffs[::-1], _X, domain=ZZ).rem(phi)
    low = [int(c) for c in reversed(rem.all_coeffs())]
    return tuple(low + [0] * (phi.degree() - len(low)))


@dataclass(frozen=True, eq=False)
class CyclotomicInt:
    """sum(coeffs[k] * xi_q**k); not a canonical representation."""
    modulus: Modulus
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "modulus", Modulus.of(self.modulus))
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        require(len(self.coeffs) == self.modulus.q,
                f"expected {self.modulus.q} coefficients, got {len(self.coeffs)}",
                ErrorType.LENGTH_MISMATCH, q=self.modulus.q, length=len(self.coeffs))

    @property
    def q(self) -> int:
        return self.modulus.q

    # --- Ring operations ---

    def _check(self, other: "CyclotomicInt"):
        if other.modulus != self.modulus:
            raise ModulusMismatchError(
                f"cannot combine elements of Z[xi_{self.q}] and Z[xi_{other.q}]",
                left=self.q, right=other.q)

    def _coerce(self, other: Union["CyclotomicInt", int]) -> "CyclotomicInt":
        if isinstance(other, CyclotomicInt):
            self._check(other)
            return other
        if isinstance(other, (int, np.integer)):
            return from_integer(self.modulus, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicInt(self.modulus, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicInt(self.modulus, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return CyclotomicInt(self.modulus, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return CyclotomicInt(self.modulus, tuple(int(other) * a for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        q = self.q
        out = [0] * q
        right = [(j, b) for j, b in enumerate(other.coeffs) if b]
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in right:
                out[(i + j) % q] += a * b
        return CyclotomicInt(self.modulus, tuple(out))

    __rmul__ = __mul__

    def conj(self) -> "CyclotomicInt":
        q = self.q
        return CyclotomicInt(self.modulus, tuple(self.coeffs[(q - k) % q] for k in range(q)))

    def norm_sq(self) -> "CyclotomicInt":
        return self * self.conj()

    # --- Decisions ---

    def canonical(self) -> Tuple[int, ...]:
        """Remainder modulo Phi_q: coordinates in the basis 1, xi, ..., xi^(phi(q)-1)."""
        return _reduce(self.q, self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.canonical())

    def rational_value(self) -> Optional[int]:
        rem = self.canonical()
        if any(rem[1:]):
            return None
        return rem[0]

    def embed(self) -> complex:
        """Numeric value at xi_q = exp(2*pi*i/q)."""
        q = self.q
        roots = np.exp(2j * np.pi * np.arange(q) / q)
        return complex(np.dot(np.array(self.coeffs, dtype=float), roots))

    def __eq__(self, other):
        if isinstance(other, (CyclotomicInt, int, np.integer)):
            other = self._coerce(other)
            if other is NotImplemented:
                return other
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.q, self.canonical()))

    def __repr__(self):
        terms = [f"{c}*xi^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"CyclotomicInt(q={self.q}: {' + '.join(terms) or '0'})"


# --- Constructors and functional API ---

def zero(q: ModulusLike) -> CyclotomicInt:
    modulus = Modulus.of(q)
    return CyclotomicInt(modulus, (0,) * modulus.q)


def from_integer(q: ModulusLike, n: int) -> CyclotomicInt:
    modulus = Modulus.of(q)
    return CyclotomicInt(modulus, (int(n),) + (0,) * (modulus.q - 1))


def one(q: ModulusLike) -> CyclotomicInt:
    return from_integer(q, 1)


def root_power(q: ModulusLike, k: int) -> CyclotomicInt:
    """xi_q ** (k mod q)."""
    modulus = Modulus.of(q)
    coeffs = [0] * modulus.q
    coeffs[int(k) % modulus.q] = 1
    return CyclotomicInt(modulus, tuple(coeffs))


def from_exponents(q: ModulusLike, exponents: Iterable[int]) -> CyclotomicInt:
    """sum of xi_q**e over the given exponents."""
    modulus = Modulus.of(q)
    counts = np.bincount(np.asarray(list(exponents), dtype=np.int64) % modulus.q,
                         minlength=modulus.q)
    return CyclotomicInt(modulus, tuple(int(c) for c in counts))


def add(x: CyclotomicInt, y: CyclotomicInt) -> CyclotomicInt:
    x._check(y)
    return x + y


def sub(x: CyclotomicInt, y: CyclotomicInt) -> CyclotomicInt:
    x._check(y)
    return x - y


def mul(x: CyclotomicInt, y: CyclotomicInt) -> CyclotomicInt:
    x._check(y)
    return x * y


def conj(x: CyclotomicInt) -> CyclotomicInt:
    return x.conj()


def is_zero(x: CyclotomicInt) -> bool:
    return x.is_zero()


def rational_value(x: CyclotomicInt) -> Optional[int]:
    return x.rational_value()


@lru_cache(maxsize=262144)
def _count_norm_sq(q: int, counts: Tuple[int, ...]) -> Optional[int]:
    return CyclotomicInt(Modulus(q), counts).norm_sq().rational_value()


def rational_norm_sq(q: ModulusLike, counts: Sequence[int]) -> int:
    """
    |S|^2 for S = sum(counts[k] * xi^k), certified to be a rational integer.

    Raises ConsistencyError when S * conj(S) is irrational.
    """
    modulus = Modulus.of(q)
    key = tuple(int(c) for c in counts)
    value = _count_norm_sq(modulus.q, key)
    if value is None:
        raise ConsistencyError("|S|^2 is not a rational integer", q=modulus.q, counts=list(key))
    return value

