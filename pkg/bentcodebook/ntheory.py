"""
Integer utilities for the codebook constructions

Smallest prime factor (which fixes the size of the phase family) and a
solver for linear congruences a*x = c (mod m).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Union

from .errors import ErrorType, ParameterError, require

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Modulus:
    """The ring size Q of Z_Q."""
    q: int

    def __post_init__(self):
        if isinstance(self.q, bool) or not isinstance(self.q, int):
            raise ParameterError(f"modulus must be an integer, got {self.q!r}", q=self.q)
        if self.q < 2:
            raise ParameterError(f"modulus must be >= 2, got {self.q}", q=self.q)

    @classmethod
    def of(cls, value: Union[int, "Modulus"]) -> "Modulus":
        return value if isinstance(value, Modulus) else cls(int(value))

    def __int__(self) -> int:
        return self.q

    def __index__(self) -> int:
        return self.q

    def residue(self, value: int) -> "Residue":
        return Residue(value % self.q, self)


@dataclass(frozen=True, order=True)
class Residue:
    """An element of Z_Q, always stored in [0, q)."""
    value: int
    modulus: Modulus

    def __post_init__(self):
        require(0 <= self.value < self.modulus.q,
                f"residue {self.value} outside [0, {self.modulus.q})",
                ErrorType.INDEX_OUT_OF_RANGE, value=self.value, q=self.modulus.q)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value


ModulusLike = Union[int, Modulus]


def smallest_prime_factor(q: int) -> int:
    """Least prime dividing q, by trial division up to sqrt(q)."""
    q = int(q)
    if q < 2:
        raise ParameterError(f"smallest prime factor needs q >= 2, got {q}", q=q)
    if q % 2 == 0:
        return 2
    for d in range(3, math.isqrt(q) + 1, 2):
        if q % d == 0:
            return d
    return q


def is_prime(q: int) -> bool:
    return q >= 2 and smallest_prime_factor(q) == q


def solve_linear_congruence(a: int, c: int, m: int) -> List[Residue]:
    """
    All x in [0, m) with a*x = c (mod m), ascending.

    There are gcd(a, m) solutions when gcd(a, m) divides c and none otherwise.
    """
    if m <= 1:
        raise ParameterError(f"congruence modulus must be > 1, got {m}", m=m)
    modulus = Modulus(m)
    a %= m
    c %= m
    g = math.gcd(a, m)
    if c % g != 0:
        return []
    step = m // g
    x0 = 0 if step == 1 else (pow(a // g, -1, step) * (c // g)) % step
    return [Residue(x0 + k * step, modulus) for k in range(g)]


def unique_solution(a: int, c: int, m: int) -> Residue:
    """The solution of a*x = c (mod m) when gcd(a, m) = 1."""
    solutions = solve_linear_congruence(a, c, m)
    require(len(solutions) == 1,
            f"expected a unique solution of {a}x = {c} (mod {m}), found {len(solutions)}",
            a=a, c=c, m=m)
    return solutions[0]
