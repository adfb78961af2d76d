"""
Codebook constructions from the bent family x2 * pi(x1) + ...

Two families over Z_Q, both made of a phase family of p_min * Q^2 words plus
the standard basis:

- construction one: words of length Q^2 with entries xi^(j(a*pi(i)+b) + u*sigma(i)) / Q,
  giving a ((p_min + 1) Q^2, Q^2) codebook;
- construction two: the same words with row i = ell removed, scaled by
  1/sqrt(Q(Q-1)), giving a (p_min Q^2 + Q^2 - Q, Q(Q-1)) codebook.

Entry (i, j) sits at flat index i*Q + j over the kept rows (i major, j minor);
phase words are enumerated with (a, b, u) in lexicographic order. Words are
kept as exponent tables and only materialised by the analysis layer.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import settings
from .cyclotomic import CyclotomicInt, from_integer, root_power
from .errors import ErrorType, GuardExceededError, ModulusMismatchError, ParameterError, SpecError, require
from .gbf import PermutationZQ, identity_permutation
from .ntheory import Modulus, ModulusLike, smallest_prime_factor

logger = logging.getLogger(__name__)

DUMP_FORMAT = "bentcodebook-exponents/1"


class ConstructionKind(str, Enum):
    ONE = "one"
    TWO = "two"

    @classmethod
    def parse(cls, value: Union[int, str, "ConstructionKind"]) -> "ConstructionKind":
        if isinstance(value, ConstructionKind):
            return value
        lookup = {"1": cls.ONE, "one": cls.ONE, "2": cls.TWO, "two": cls.TWO}
        try:
            return lookup[str(value).strip().lower()]
        except KeyError:
            raise ParameterError(f"unknown construction {value!r}; expected 1 or 2",
                                 construction=value) from None

    @property
    def number(self) -> int:
        return 1 if self is ConstructionKind.ONE else 2


# --- Codewords ---

@dataclass(frozen=True, eq=False)
class StandardBasisWord:
    index: int
    length: int
    modulus: Optional[Modulus] = None

    def __post_init__(self):
        require(0 <= self.index < self.length,
                f"basis index {self.index} outside [0, {self.length})",
                ErrorType.INDEX_OUT_OF_RANGE, index=self.index, length=self.length)

    @property
    def scale_sq(self) -> Fraction:
        return Fraction(1)


@dataclass(frozen=True, eq=False)
class PhaseWord:
    """sqrt(scale_sq) * (xi^e_0, ..., xi^e_(K-1))."""
    modulus: Modulus
    exponents: np.ndarray
    scale_sq: Fraction
    label: Optional[Tuple[int, int, int]] = None

    def __post_init__(self):
        require(self.scale_sq == Fraction(1, len(self.exponents)),
                f"phase word of length {len(self.exponents)} must have scale 1/{len(self.exponents)}",
                scale_sq=str(self.scale_sq))

    @property
    def length(self) -> int:
        return len(self.exponents)


Codeword = Union[StandardBasisWord, PhaseWord]


@dataclass(frozen=True)
class CodewordEntry:
    exact: CyclotomicInt   # entry = exact * sqrt(scale_sq)
    scale_sq: Fraction
    value: complex


def codeword_length(w: Codeword) -> int:
    return w.length


def codeword_entry(w: Codeword, k: int) -> CodewordEntry:
    length = codeword_length(w)
    require(0 <= k < length, f"entry index {k} outside [0, {length})",
            ErrorType.INDEX_OUT_OF_RANGE, k=k, length=length)
    if isinstance(w, StandardBasisWord):
        hit = 1 if k == w.index else 0
        # rational entries are representable over any modulus
        return CodewordEntry(exact=from_integer(w.modulus or 2, hit), scale_sq=Fraction(1), value=complex(hit))
    e = int(w.exponents[k])
    q = w.modulus.q
    value = np.exp(2j * np.pi * e / q) * np.sqrt(float(w.scale_sq))
    return CodewordEntry(exact=root_power(w.modulus, e), scale_sq=w.scale_sq, value=complex(value))


def codeword_vector(w: Codeword) -> np.ndarray:
    """Dense complex materialisation."""
    if isinstance(w, StandardBasisWord):
        vec = np.zeros(w.length, dtype=complex)
        vec[w.index] = 1.0
        return vec
    return np.sqrt(float(w.scale_sq)) * np.exp(2j * np.pi * w.exponents.astype(np.float64) / w.modulus.q)


def codeword_norm_sq(w: Codeword) -> Fraction:
    """Exact sum of |entry|^2."""
    if isinstance(w, StandardBasisWord):
        return Fraction(1)
    values, counts = np.unique(w.exponents, return_counts=True)
    total = 0
    for e, count in zip(values, counts):
        root = root_power(w.modulus, int(e))
        magnitude = (root * root.conj()).rational_value()
        total += int(count) * magnitude
    return total * w.scale_sq


# --- Codebook ---

@dataclass(eq=False)
class Codebook:
    q: Modulus
    p_min: int
    construction: ConstructionKind
    pi: PermutationZQ
    sigma: PermutationZQ
    phase_exponents: np.ndarray   # (p_min * Q^2, K), read-only
    deleted_row: Optional[int] = None
    metadata_extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def modulus(self) -> int:
        return self.q.q

    @property
    def K(self) -> int:
        return int(self.phase_exponents.shape[1])

    @property
    def phase_count(self) -> int:
        return int(self.phase_exponents.shape[0])

    @property
    def N(self) -> int:
        return self.phase_count + self.K

    @property
    def scale_sq(self) -> Fraction:
        return Fraction(1, self.K)

    @property
    def rows(self) -> List[int]:
        """Row indices i kept in the flat layout."""
        return [i for i in range(self.modulus) if i != self.deleted_row]

    def phase_label(self, n: int) -> Tuple[int, int, int]:
        q = self.modulus
        require(0 <= n < self.phase_count, f"phase index {n} outside [0, {self.phase_count})",
                ErrorType.INDEX_OUT_OF_RANGE, n=n)
        a, rest = divmod(n, q * q)
        b, u = divmod(rest, q)
        return a, b, u

    def phase_index(self, a: int, b: int, u: int) -> int:
        q = self.modulus
        require(0 <= a < self.p_min and 0 <= b < q and 0 <= u < q,
                f"(a, b, u) = ({a}, {b}, {u}) outside Z_{self.p_min} x Z_{q} x Z_{q}",
                ErrorType.INDEX_OUT_OF_RANGE, a=a, b=b, u=u)
        return (a * q + b) * q + u

    def codeword(self, n: int) -> Codeword:
        """Codeword n: phase words first, then the standard basis."""
        require(0 <= n < self.N, f"codeword index {n} outside [0, {self.N})",
                ErrorType.INDEX_OUT_OF_RANGE, n=n)
        if n < self.phase_count:
            return PhaseWord(self.q, self.phase_exponents[n], self.scale_sq, self.phase_label(n))
        return StandardBasisWord(n - self.phase_count, self.K, self.q)

    @cached_property
    def codewords(self) -> Tuple[Codeword, ...]:
        return tuple(self.codeword(n) for n in range(self.N))

    def materialize_phase(self) -> np.ndarray:
        """Phase words as a dense complex (p_min Q^2, K) array."""
        return np.sqrt(1.0 / self.K) * np.exp(
            2j * np.pi * self.phase_exponents.astype(np.float64) / self.modulus)

    def metadata(self) -> Dict[str, Any]:
        return {
            "format": DUMP_FORMAT,
            "construction": self.construction.number,
            "q": self.modulus,
            "p_min": self.p_min,
            "N": self.N,
            "K": self.K,
            "ell": self.deleted_row,
            "pi": list(self.pi.images),
            "sigma": list(self.sigma.images),
            "layout": "row i major, column j minor; phase words (a, b, u) lexicographic",
            **self.metadata_extra,
        }


# --- Builders ---

def construction_parameters(construction: Union[int, str, ConstructionKind], q: int) -> Tuple[int, int, int]:
    """(p_min, N, K) for the given construction and Q, without building anything."""
    kind = ConstructionKind.parse(construction)
    _check_q(kind, q)
    p = smallest_prime_factor(q)
    if kind is ConstructionKind.ONE:
        return p, (p + 1) * q * q, q * q
    return p, p * q * q + q * q - q, q * (q - 1)


def _check_q(kind: ConstructionKind, q: int):
    minimum = 2 if kind is ConstructionKind.ONE else 3
    if isinstance(q, bool) or not isinstance(q, (int, np.integer)) or q < minimum:
        raise ParameterError(f"construction {kind.number} needs an integer q >= {minimum}, got {q!r}",
                             construction=kind.number, q=q)


def _check_maps(q: Modulus, pi: PermutationZQ, sigma: PermutationZQ):
    for name, perm in (("pi", pi), ("sigma", sigma)):
        if perm.modulus != q:
            raise ModulusMismatchError(f"{name} permutes Z_{perm.q} but the codebook is over Z_{q.q}",
                                       name=name, expected=q.q, got=perm.q)


def _phase_table(q: int, p: int, pi: PermutationZQ, sigma: PermutationZQ,
                 rows: Sequence[int], build_guard: int) -> np.ndarray:
    entries = p * q * q * len(rows) * q
    if entries > build_guard:
        raise GuardExceededError(
            f"phase table of {entries} entries exceeds the build guard {build_guard}",
            q=q, entries=entries, guard=build_guard)
    rows = np.asarray(rows, dtype=np.int64)
    pi_rows = pi.as_array()[rows]
    sigma_rows = sigma.as_array()[rows]
    a = np.arange(p, dtype=np.int64)
    b = np.arange(q, dtype=np.int64)
    u = np.arange(q, dtype=np.int64)
    j = np.arange(q, dtype=np.int64)

    lin = (a[:, None, None] * pi_rows[None, None, :] + b[None, :, None]) % q       # (p, q, R)
    jterm = (lin[..., None] * j) % q                                                # (p, q, R, q)
    uterm = (u[:, None] * sigma_rows[None, :]) % q                                  # (q, R)
    table = (jterm[:, :, None, :, :] + uterm[None, None, :, :, None]) % q           # (p, q, q, R, q)

    dtype = np.uint16 if q <= np.iinfo(np.uint16).max else np.int64
    table = np.ascontiguousarray(table.reshape(p * q * q, len(rows) * q).astype(dtype))
    table.flags.writeable = False
    return table


def _build(kind: ConstructionKind, q: ModulusLike, pi: Optional[PermutationZQ],
           sigma: Optional[PermutationZQ], ell: Optional[int],
           build_guard: Optional[int]) -> Codebook:
    _check_q(kind, int(q))
    modulus = Modulus.of(q)
    pi = pi or identity_permutation(modulus)
    sigma = sigma or identity_permutation(modulus)
    _check_maps(modulus, pi, sigma)
    p = smallest_prime_factor(modulus.q)
    rows = [i for i in range(modulus.q) if i != ell]
    table = _phase_table(modulus.q, p, pi, sigma, rows, build_guard or settings.build_guard)
    codebook = Codebook(q=modulus, p_min=p, construction=kind, pi=pi, sigma=sigma,
                        phase_exponents=table, deleted_row=ell)
    logger.info(f"Built construction {kind.number} codebook: q={modulus.q}, p_min={p}, "
                f"N={codebook.N}, K={codebook.K}")
    return codebook


def build_construction_one(q: ModulusLike, pi: Optional[PermutationZQ] = None,
                           sigma: Optional[PermutationZQ] = None,
                           build_guard: Optional[int] = None) -> Codebook:
    """The ((p_min + 1) Q^2, Q^2) codebook with I_max = 1/Q."""
    return _build(ConstructionKind.ONE, q, pi, sigma, None, build_guard)


def build_construction_two(q: ModulusLike, pi: Optional[PermutationZQ] = None,
                           sigma: Optional[PermutationZQ] = None, ell: int = 0,
                           build_guard: Optional[int] = None) -> Codebook:
    """The (p_min Q^2 + Q^2 - Q, Q(Q - 1)) codebook; row ell is deleted."""
    _check_q(ConstructionKind.TWO, int(q))
    require(0 <= int(ell) < int(q), f"ell must lie in [0, {int(q)}), got {ell}",
            ErrorType.INDEX_OUT_OF_RANGE, ell=ell, q=int(q))
    return _build(ConstructionKind.TWO, q, pi, sigma, int(ell), build_guard)


def build_codebook(construction: Union[int, str, ConstructionKind], q: ModulusLike,
                   pi: Optional[PermutationZQ] = None, sigma: Optional[PermutationZQ] = None,
                   ell: int = 0, build_guard: Optional[int] = None) -> Codebook:
    kind = ConstructionKind.parse(construction)
    if kind is ConstructionKind.ONE:
        return build_construction_one(q, pi, sigma, build_guard=build_guard)
    return build_construction_two(q, pi, sigma, ell, build_guard=build_guard)


def phase_words_distinct(cb: Codebook) -> bool:
    return np.unique(cb.phase_exponents, axis=0).shape[0] == cb.phase_count


# --- Dumps ---

def export_codebook(cb: Codebook, path: Union[str, Path]) -> Path:
    """Write the exponent matrix plus metadata as .csv or .npz (by suffix)."""
    path = Path(path)
    meta = cb.metadata()
    if path.suffix == ".npz":
        np.savez(path, exponents=np.asarray(cb.phase_exponents), metadata=json.dumps(meta, sort_keys=True))
    else:
        with path.open("w", newline="") as handle:
            handle.write("# " + json.dumps(meta, sort_keys=True) + "\n")
            writer = csv.writer(handle)
            for row in cb.phase_exponents:
                writer.writerow(int(v) for v in row)
    logger.info(f"Exported N={cb.N}, K={cb.K} codebook to {path}")
    return path


def load_codebook_dump(path: Union[str, Path]) -> Codebook:
    """Read a dump back; the exponent table must match a fresh build."""
    path = Path(path)
    if path.suffix == ".npz":
        with np.load(path) as data:
            meta = json.loads(str(data["metadata"]))
            exponents = np.array(data["exponents"])
    else:
        with path.open() as handle:
            header = handle.readline()
            if not header.startswith("# "):
                raise SpecError(f"{path} has no metadata header", path=str(path))
            meta = json.loads(header[2:])
            exponents = np.array([[int(v) for v in row] for row in csv.reader(handle) if row])
    if meta.get("format") != DUMP_FORMAT:
        raise SpecError(f"{path} is not a {DUMP_FORMAT} dump", path=str(path))
    q = Modulus(int(meta["q"]))
    cb = build_codebook(meta["construction"], q, PermutationZQ(q, meta["pi"]),
                        PermutationZQ(q, meta["sigma"]), ell=meta.get("ell") or 0)
    if exponents.shape != cb.phase_exponents.shape or not np.array_equal(exponents, cb.phase_exponents):
        raise SpecError(f"exponent table in {path} does not match its metadata", path=str(path))
    return cb
