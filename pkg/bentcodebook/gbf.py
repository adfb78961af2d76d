"""
Generalised Boolean functions over Z_Q

Functions Z_Q^m -> Z_Q stored as value tables, permutations of Z_Q, the
Fourier coefficients F_f(a), an exact bentness decision and the bent family
f(x1, x2) = x2 * omega(x1) + theta(x1).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .config import settings
from .cyclotomic import CyclotomicInt, rational_norm_sq
from .errors import ErrorType, GuardExceededError, ModulusMismatchError, PermutationError, require
from .ntheory import Modulus, ModulusLike

logger = logging.getLogger(__name__)

# Exhaustive tables are O(q^(2m)); beyond this domain size we refuse.
MAX_DOMAIN_SIZE = 10 ** 6


# --- Permutations ---

@dataclass(frozen=True)
class PermutationZQ:
    """A bijection of Z_Q given by its image list."""
    modulus: Modulus
    images: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "modulus", Modulus.of(self.modulus))
        images = tuple(int(v) for v in self.images)
        object.__setattr__(self, "images", images)
        q = self.modulus.q
        if len(images) != q or sorted(images) != list(range(q)):
            raise PermutationError(f"images {list(images)} do not form a permutation of Z_{q}",
                                   q=q, images=list(images))

    @property
    def q(self) -> int:
        return self.modulus.q

    def __call__(self, x: int) -> int:
        return self.images[int(x) % self.q]

    def __len__(self) -> int:
        return self.q

    def inverse(self) -> "PermutationZQ":
        inv = [0] * self.q
        for x, y in enumerate(self.images):
            inv[y] = x
        return PermutationZQ(self.modulus, tuple(inv))

    def as_array(self) -> np.ndarray:
        return np.array(self.images, dtype=np.int64)


def identity_permutation(q: ModulusLike) -> PermutationZQ:
    modulus = Modulus.of(q)
    return PermutationZQ(modulus, tuple(range(modulus.q)))


def affine_permutation(q: ModulusLike, c: int, d: int) -> PermutationZQ:
    """x -> c*x + d, a permutation exactly when gcd(c, q) = 1."""
    modulus = Modulus.of(q)
    if math.gcd(c, modulus.q) != 1:
        raise PermutationError(f"x -> {c}x + {d} is not a permutation of Z_{modulus.q}",
                               q=modulus.q, c=c, d=d)
    return PermutationZQ(modulus, tuple((c * x + d) % modulus.q for x in range(modulus.q)))


def random_permutation(q: ModulusLike, seed: int) -> PermutationZQ:
    """Seeded Fisher-Yates shuffle of the identity."""
    modulus = Modulus.of(q)
    rng = np.random.default_rng(seed)
    images = list(range(modulus.q))
    for i in range(modulus.q - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        images[i], images[j] = images[j], images[i]
    return PermutationZQ(modulus, tuple(images))


# --- Functions Z_Q^m -> Z_Q ---

@dataclass(frozen=True)
class FunctionZQ:
    """Value table of f: Z_Q^m -> Z_Q, row-major with the last coordinate fastest."""
    modulus: Modulus
    m: int
    table: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "modulus", Modulus.of(self.modulus))
        table = tuple(int(v) for v in self.table)
        object.__setattr__(self, "table", table)
        q = self.modulus.q
        require(self.m >= 1, f"arity must be positive, got {self.m}", m=self.m)
        size = q ** self.m
        if size > MAX_DOMAIN_SIZE:
            raise GuardExceededError(f"q^m = {size} exceeds the domain guard {MAX_DOMAIN_SIZE}",
                                     q=q, m=self.m)
        require(len(table) == size, f"table needs {size} entries, got {len(table)}",
                ErrorType.LENGTH_MISMATCH, q=q, m=self.m)
        require(all(0 <= v < q for v in table), f"table values must lie in [0, {q})", q=q)

    @property
    def q(self) -> int:
        return self.modulus.q

    @property
    def domain_size(self) -> int:
        return self.q ** self.m

    def index(self, x: Sequence[int]) -> int:
        require(len(x) == self.m, f"expected {self.m} coordinates, got {len(x)}",
                ErrorType.ARITY_MISMATCH, m=self.m)
        idx = 0
        for coord in x:
            idx = idx * self.q + int(coord) % self.q
        return idx

    def __call__(self, *x: int) -> int:
        return self.table[self.index(x)]

    def points(self) -> np.ndarray:
        """All x in Z_Q^m, one per row, in table order."""
        return domain_points(self.q, self.m)

    def as_array(self) -> np.ndarray:
        return np.array(self.table, dtype=np.int64)


def domain_points(q: int, m: int) -> np.ndarray:
    return np.indices((q,) * m).reshape(m, -1).T.astype(np.int64)


def function_from_callable(q: ModulusLike, m: int, fn: Callable[..., int]) -> FunctionZQ:
    modulus = Modulus.of(q)
    pts = domain_points(modulus.q, m)
    return FunctionZQ(modulus, m, tuple(int(fn(*map(int, x))) % modulus.q for x in pts))


def constant_function(q: ModulusLike, value: int = 0, m: int = 1) -> FunctionZQ:
    modulus = Modulus.of(q)
    return FunctionZQ(modulus, m, (value % modulus.q,) * modulus.q ** m)


def affine_function(q: ModulusLike, c: int, d: int) -> FunctionZQ:
    modulus = Modulus.of(q)
    return FunctionZQ(modulus, 1, tuple((c * x + d) % modulus.q for x in range(modulus.q)))


def random_function(q: ModulusLike, seed: int, m: int = 1) -> FunctionZQ:
    modulus = Modulus.of(q)
    rng = np.random.default_rng(seed)
    return FunctionZQ(modulus, m, tuple(int(v) for v in rng.integers(0, modulus.q, modulus.q ** m)))


def make_kumar_gbf(omega: PermutationZQ, theta: FunctionZQ) -> FunctionZQ:
    """f(x1, x2) = x2 * omega(x1) + theta(x1) on Z_Q^2."""
    if omega.modulus != theta.modulus:
        raise ModulusMismatchError(f"omega is over Z_{omega.q} but theta over Z_{theta.q}",
                                   omega=omega.q, theta=theta.q)
    require(theta.m == 1, f"theta must be a function of one variable, got m={theta.m}",
            ErrorType.ARITY_MISMATCH, m=theta.m)
    q = omega.q
    table = [(x2 * omega.images[x1] + theta.table[x1]) % q for x1 in range(q) for x2 in range(q)]
    return FunctionZQ(omega.modulus, 2, tuple(table))


# --- Fourier coefficients ---

@dataclass(frozen=True)
class FourierCoefficient:
    a: Tuple[int, ...]
    exact: CyclotomicInt   # S(a) = sum_x xi^(f(x) - a.x)
    value: complex         # S(a) / sqrt(q^m)

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def _exponent_counts(f: FunctionZQ, a: Sequence[int], points: np.ndarray) -> np.ndarray:
    exps = (f.as_array() - points @ np.asarray(a, dtype=np.int64)) % f.q
    return np.bincount(exps, minlength=f.q)


def fourier_coefficient(f: FunctionZQ, a: Sequence[int]) -> FourierCoefficient:
    require(len(a) == f.m, f"point has {len(a)} coordinates but f has arity {f.m}",
            ErrorType.ARITY_MISMATCH, m=f.m, a=list(a))
    a = tuple(int(v) % f.q for v in a)
    counts = _exponent_counts(f, a, f.points())
    exact = CyclotomicInt(f.modulus, tuple(int(c) for c in counts))
    return FourierCoefficient(a=a, exact=exact, value=exact.embed() / math.sqrt(f.domain_size))


def fourier_spectrum(f: FunctionZQ) -> np.ndarray:
    """All normalised F_f(a) as an array indexed by a, via an m-dimensional FFT."""
    q = f.q
    phases = np.exp(2j * np.pi * f.as_array() / q).reshape((q,) * f.m)
    return np.fft.fftn(phases) / math.sqrt(f.domain_size)


@dataclass
class SpectrumEntry:
    a: Tuple[int, ...]
    norm_sq: int        # |S(a)|^2, exact
    magnitude: float    # |F_f(a)|


@dataclass
class BentnessReport:
    q: int
    m: int
    is_bent: bool
    entries: List[SpectrumEntry] = field(default_factory=list)

    @property
    def parseval_total(self) -> int:
        return sum(e.norm_sq for e in self.entries)

    @property
    def failing_points(self) -> List[Tuple[int, ...]]:
        target = self.q ** self.m
        return [e.a for e in self.entries if e.norm_sq != target]


def is_generalized_bent(f: FunctionZQ, max_workers: Optional[int] = None) -> BentnessReport:
    """
    Decide bentness exactly: |S(a)|^2 must equal q^m for every a.

    The per-a loop runs on a thread pool; entries come back in table order,
    with magnitudes read off the FFT spectrum.
    """
    points = f.points()
    target = f.domain_size
    magnitudes = np.abs(fourier_spectrum(f)).ravel()

    def evaluate(i: int) -> SpectrumEntry:
        a = points[i]
        counts = _exponent_counts(f, a, points)
        return SpectrumEntry(a=tuple(int(v) for v in a), norm_sq=rational_norm_sq(f.q, counts),
                             magnitude=float(magnitudes[i]))

    workers = settings.thread_count(max_workers)
    if workers == 1:
        entries = [evaluate(i) for i in range(len(points))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(evaluate, range(len(points))))

    is_bent = all(e.norm_sq == target for e in entries)
    logger.debug(f"Bentness of f over Z_{f.q}^{f.m}: {is_bent}")
    return BentnessReport(q=f.q, m=f.m, is_bent=is_bent, entries=entries)
