"""
Correlation analysis for bentcodebook

Pairwise inner products (exact and floating point), I_max by a full pairwise
sweep or by one representative pair per difference class, the Welch bound,
optimality ratios and the Welch-bound-equality test.

Exact magnitudes are carried as Fractions of |<c1, c2>|^2; histograms are
keyed by those Fractions so that sweeps split over threads merge the same way
in any order.
"""

import logging
import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import settings
from .construction import (
    Codebook,
    Codeword,
    ConstructionKind,
    StandardBasisWord,
    codeword_entry,
    codeword_length,
    codeword_vector,
    construction_parameters,
)
from .cyclotomic import rational_norm_sq, root_power
from .errors import (
    ConsistencyError,
    ErrorType,
    ForeignCodebookError,
    GuardExceededError,
    ModulusMismatchError,
    ParameterError,
    require,
)
from .ntheory import unique_solution

logger = logging.getLogger(__name__)

RationalMagnitudeSq = Fraction

DEFAULT_TILE_ROWS = 256
SYMMETRY_CHUNK_ROWS = 4096
# complex product, |.|^2, upper-triangle mask and the selected values
GRAM_BYTES_PER_ENTRY = 41


class SweepMode(str, Enum):
    EXACT = "exact"
    FLOAT = "float"


class SweepMethod(str, Enum):
    BRUTE_FORCE = "brute_force"
    SYMMETRY_REDUCED = "symmetry_reduced"


@dataclass(frozen=True)
class CorrelationValue:
    mag_sq: Optional[Fraction]   # exact |<c1, c2>|^2
    float_mag: float             # |<c1, c2>| in floating point


@dataclass
class CorrelationReport:
    N: int
    K: int
    imax_exact: Fraction          # max |<c_i, c_j>|^2
    imax_float: float
    welch_bound: float
    ratio: float                  # I_max / I_W
    histogram: Dict[Fraction, int]
    method: SweepMethod
    mode: SweepMode
    max_deviation: float = 0.0    # worst |float_mag^2 - mag_sq| seen (float mode)
    elapsed_s: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def pair_count(self) -> int:
        return sum(self.histogram.values())

    @property
    def imax(self) -> float:
        return math.sqrt(self.imax_exact)

    @property
    def support(self) -> List[Fraction]:
        return sorted(self.histogram)

    def same_result(self, other: "CorrelationReport") -> bool:
        """Equal maxima and histograms (method, timing and mode ignored)."""
        return self.imax_exact == other.imax_exact and dict(self.histogram) == dict(other.histogram)


# --- Inner products ---

def inner_product(c1: Codeword, c2: Codeword) -> CorrelationValue:
    """<c1, c2> = sum_k c1[k] * conj(c2[k]), exactly and in floating point."""
    n1, n2 = codeword_length(c1), codeword_length(c2)
    require(n1 == n2, f"codeword lengths differ: {n1} vs {n2}", ErrorType.LENGTH_MISMATCH,
            left=n1, right=n2)

    if isinstance(c1, StandardBasisWord) and isinstance(c2, StandardBasisWord):
        hit = 1 if c1.index == c2.index else 0
        return CorrelationValue(mag_sq=Fraction(hit), float_mag=float(hit))

    if isinstance(c1, StandardBasisWord) or isinstance(c2, StandardBasisWord):
        basis, phase = (c1, c2) if isinstance(c1, StandardBasisWord) else (c2, c1)
        entry = codeword_entry(phase, basis.index)
        norm = entry.exact.norm_sq().rational_value()
        if norm is None:
            raise ConsistencyError("entry magnitude is not rational", index=basis.index)
        return CorrelationValue(mag_sq=norm * entry.scale_sq, float_mag=abs(entry.value))

    if c1.modulus != c2.modulus:
        raise ModulusMismatchError(f"phase words over Z_{c1.modulus.q} and Z_{c2.modulus.q}",
                                   left=c1.modulus.q, right=c2.modulus.q)
    q = c1.modulus.q
    diff = (c1.exponents.astype(np.int64) - c2.exponents.astype(np.int64)) % q
    counts = np.bincount(diff, minlength=q)
    try:
        norm = rational_norm_sq(q, counts)
    except ConsistencyError as exc:
        raise ConsistencyError("|<c1, c2>|^2 is not rational", left=c1.label, right=c2.label,
                               counts=exc.details.get("counts")) from exc
    float_mag = abs(np.vdot(codeword_vector(c2), codeword_vector(c1)))
    return CorrelationValue(mag_sq=norm * c1.scale_sq * c2.scale_sq, float_mag=float(float_mag))


# --- Welch bound ---

@dataclass(frozen=True)
class WelchBound:
    N: int
    K: int
    squared: Fraction    # (N - K) / ((N - 1) K)

    @property
    def value(self) -> float:
        return math.sqrt(self.squared)


def welch_bound(N: int, K: int) -> WelchBound:
    if K < 1 or N <= K:
        raise ParameterError(f"Welch bound needs N > K >= 1, got N={N}, K={K}", N=N, K=K)
    return WelchBound(N=N, K=K, squared=Fraction(N - K, (N - 1) * K))


def family_parameters(construction: Union[int, str, ConstructionKind], p: int, q: int) -> Tuple[int, int]:
    """(N, K) of a construction for an arbitrary p in place of p_min."""
    kind = ConstructionKind.parse(construction)
    if kind is ConstructionKind.ONE:
        return (p + 1) * q * q, q * q
    return p * q * q + q * q - q, q * (q - 1)


def specialized_welch_sq(construction: Union[int, str, ConstructionKind], p: int, q: int) -> Fraction:
    """The Welch bound squared, written directly in p and Q for each construction."""
    kind = ConstructionKind.parse(construction)
    if kind is ConstructionKind.ONE:
        return Fraction(p, p * q * q + q * q - 1)
    return Fraction(p * q, (p * q * q + q * q - q - 1) * (q - 1))


def check_specialized_welch(construction: Union[int, str, ConstructionKind], p: int, q: int) -> bool:
    N, K = family_parameters(construction, p, q)
    return specialized_welch_sq(construction, p, q) == welch_bound(N, K).squared


# --- Analytic values and ratios ---

def analytic_imax_sq(construction: Union[int, str, ConstructionKind], q: int) -> Fraction:
    """I_max^2: 1/Q^2 for construction one, 1/(Q-1)^2 for construction two."""
    kind = ConstructionKind.parse(construction)
    if kind is ConstructionKind.ONE:
        return Fraction(1, q * q)
    return Fraction(1, (q - 1) ** 2)


def stated_imax_sq_two(q: int) -> Fraction:
    """The value 1/(Q(Q-1)) that the published statement gives for construction two."""
    return Fraction(1, q * (q - 1))


ERRATUM_NOTE = ("construction two: the published statement gives I_max = 1/sqrt(Q(Q-1)) and its "
                "table uses that value, but the case analysis ends with 1/(Q-1), which is what "
                "exhaustive sweeps observe; the 1/sqrt(Q(Q-1)) column is reported as a variant")


def closed_form_ratio_sq(construction: Union[int, str, ConstructionKind], p: int, q: int) -> Fraction:
    """(I_max / I_W)^2 as the sum of terms in p and Q."""
    kind = ConstructionKind.parse(construction)
    if kind is ConstructionKind.ONE:
        return 1 + Fraction(1, p) - Fraction(1, q * q * p)
    return (Fraction(q, q - 1) + Fraction(q, (q - 1) * p)
            - Fraction(1, (q - 1) * p) - Fraction(1, q * (q - 1) * p))


@dataclass
class RatioReport:
    construction: ConstructionKind
    p_min: int
    q: int
    N: int
    K: int
    imax_sq: Fraction
    welch_sq: Fraction
    ratio_sq: Fraction               # (I_max / I_W)^2
    imax_over_iw: float
    iw_over_imax: float
    limit_p_to_infinity: float       # p_min and Q grow together
    limit_q_to_infinity: float       # p_min held fixed
    variant_imax_sq: Optional[Fraction] = None
    variant_imax_over_iw: Optional[float] = None
    variant_iw_over_imax: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    @property
    def imax(self) -> float:
        return math.sqrt(self.imax_sq)

    @property
    def welch_bound(self) -> float:
        return math.sqrt(self.welch_sq)

    @property
    def variant_imax(self) -> Optional[float]:
        return None if self.variant_imax_sq is None else math.sqrt(self.variant_imax_sq)


def ratio_report(construction: Union[int, str, ConstructionKind], q: int) -> RatioReport:
    kind = ConstructionKind.parse(construction)
    p, N, K = construction_parameters(kind, q)
    welch = welch_bound(N, K)
    imax_sq = analytic_imax_sq(kind, q)
    ratio_sq = imax_sq / welch.squared
    closed = closed_form_ratio_sq(kind, p, q)
    if ratio_sq != closed:
        raise ConsistencyError("closed-form ratio disagrees with I_max / I_W",
                               construction=kind.number, q=q, ratio_sq=str(ratio_sq), closed=str(closed))
    ratio = math.sqrt(ratio_sq)
    report = RatioReport(
        construction=kind, p_min=p, q=q, N=N, K=K,
        imax_sq=imax_sq, welch_sq=welch.squared, ratio_sq=ratio_sq,
        imax_over_iw=ratio, iw_over_imax=1.0 / ratio,
        limit_p_to_infinity=1.0,
        limit_q_to_infinity=math.sqrt(1 + 1 / p),
    )
    if kind is ConstructionKind.TWO:
        variant_sq = stated_imax_sq_two(q)
        variant = math.sqrt(variant_sq / welch.squared)
        report.variant_imax_sq = variant_sq
        report.variant_imax_over_iw = variant
        report.variant_iw_over_imax = 1.0 / variant
        report.notes.append(ERRATUM_NOTE)
    return report


# --- Histogram helpers ---

def _finish_report(shape: Tuple[int, int], histogram: Counter, method: SweepMethod,
                   mode: SweepMode, imax_float: Optional[float], max_deviation: float,
                   started: float) -> CorrelationReport:
    N, K = shape
    expected_pairs = N * (N - 1) // 2
    total = sum(histogram.values())
    if total != expected_pairs:
        raise ConsistencyError(f"histogram counts {total} pairs, expected {expected_pairs}",
                               N=N, pairs=total)
    imax_exact = max(histogram)
    if imax_float is None:
        imax_float = math.sqrt(imax_exact)
    welch = welch_bound(N, K).value if N > K else float("nan")
    report = CorrelationReport(
        N=N, K=K, imax_exact=imax_exact, imax_float=imax_float, welch_bound=welch,
        ratio=math.sqrt(imax_exact) / welch if N > K else float("nan"),
        histogram=dict(sorted(histogram.items())), method=method, mode=mode,
        max_deviation=max_deviation, elapsed_s=time.perf_counter() - started,
    )
    if N > K and imax_float < welch - 1e-12:
        raise ConsistencyError("I_max below the Welch bound", imax=imax_float, welch=welch)
    logger.info(f"{method.value}/{mode.value} sweep: N={N}, K={K}, I_max^2={imax_exact}, "
                f"{report.elapsed_s:.3f}s")
    return report


def _row_bincount(diff: np.ndarray, q: int) -> np.ndarray:
    rows = diff.shape[0]
    offsets = (np.arange(rows, dtype=np.int64) * q)[:, None]
    return np.bincount((diff + offsets).ravel(), minlength=rows * q).reshape(rows, q)


def _lattice_snapper(den: int, tolerance: float) -> Callable[[np.ndarray], Tuple[np.ndarray, float]]:
    """Round |.|^2 values onto the lattice (1/den) Z, reporting the worst deviation."""
    def snap(mag_sq: np.ndarray) -> Tuple[np.ndarray, float]:
        numer = np.rint(mag_sq * den).astype(np.int64)
        deviation = float(np.max(np.abs(mag_sq - numer / den))) if mag_sq.size else 0.0
        if deviation > tolerance:
            raise ConsistencyError("float magnitude is off the exact lattice",
                                   deviation=deviation, tolerance=tolerance)
        return numer, deviation
    return snap


def _check_guard(N: int, guard: int, mode: SweepMode):
    if N > guard:
        raise GuardExceededError(f"{mode.value} sweep over N={N} codewords exceeds the guard {guard}",
                                 N=N, guard=guard, mode=mode.value)


# --- Brute force ---

def _exact_bruteforce(cb: Codebook) -> Counter:
    q, K = cb.modulus, cb.K
    E = cb.phase_exponents.astype(np.int64)
    M = cb.phase_count
    scale = Fraction(1, K * K)
    histogram: Counter = Counter()

    # phase / phase
    for i in range(M - 1):
        diff = (E[i] - E[i + 1:]) % q
        counts = _row_bincount(diff, q)
        distinct, multiplicity = np.unique(counts, axis=0, return_counts=True)
        for row, n in zip(distinct, multiplicity):
            histogram[rational_norm_sq(q, row) * scale] += int(n)

    # basis / phase: |<e_k, w>|^2 = |w[k]|^2
    values, multiplicity = np.unique(E, return_counts=True)
    for e, n in zip(values, multiplicity):
        norm = root_power(cb.q, int(e)).norm_sq().rational_value()
        histogram[Fraction(norm, K)] += int(n)

    # basis / basis
    histogram[Fraction(0)] += K * (K - 1) // 2
    return histogram


def gram_plan(M: int, tile_rows: int, threads: int, budget_bytes: int) -> Tuple[int, int]:
    """Tile height and worker count that keep the live Gram tiles within budget_bytes."""
    row_bytes = max(1, M) * GRAM_BYTES_PER_ENTRY
    rows = max(1, min(tile_rows, budget_bytes // row_bytes))
    workers = max(1, min(threads, budget_bytes // (rows * row_bytes)))
    return rows, workers


def _float_gram_histogram(A: np.ndarray, snap, threads: int, tile_rows: int) -> Tuple[Counter, float, float]:
    """Upper-triangle |A A^H|^2 histogram over row tiles."""
    M = A.shape[0]
    tile_rows, threads = gram_plan(M, tile_rows, threads, settings.gram_memory_bytes)
    AH = A.conj().T
    starts = list(range(0, M, tile_rows))
    logger.debug(f"Gram sweep over {M} rows: {len(starts)} tiles of {tile_rows}, {threads} workers")

    def sweep_tile(start: int) -> Tuple[Counter, float, float]:
        stop = min(start + tile_rows, M)
        gram = A[start:stop] @ AH
        mag_sq = np.abs(gram) ** 2
        rows = np.arange(start, stop)[:, None]
        mask = np.arange(M)[None, :] > rows
        picked = mag_sq[mask]
        if picked.size == 0:
            return Counter(), 0.0, 0.0
        numer, deviation = snap(picked)
        keys, counts = np.unique(numer, return_counts=True)
        logger.debug(f"tile rows {start}:{stop} -> {picked.size} pairs")
        return Counter(dict(zip(keys.tolist(), counts.tolist()))), deviation, float(picked.max())

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(sweep_tile, starts))
    else:
        results = [sweep_tile(s) for s in starts]

    merged: Counter = Counter()
    deviation = 0.0
    best = 0.0
    for counts, dev, top in results:
        merged.update(counts)
        deviation = max(deviation, dev)
        best = max(best, top)
    return merged, deviation, best


def _float_bruteforce(cb: Codebook, threads: int, tile_rows: int,
                      tolerance: float) -> Tuple[Counter, float, float]:
    K = cb.K
    den = K * K
    snap = _lattice_snapper(den, tolerance)
    A = cb.materialize_phase()
    lattice, deviation, best = _float_gram_histogram(A, snap, threads, tile_rows)

    # basis / phase pairs are the entries of A themselves
    numer, dev = snap(np.abs(A.ravel()) ** 2)
    keys, counts = np.unique(numer, return_counts=True)
    lattice.update(dict(zip(keys.tolist(), counts.tolist())))
    deviation = max(deviation, dev)
    best = max(best, float(np.max(np.abs(A)) ** 2))

    lattice[0] += K * (K - 1) // 2
    histogram = Counter({Fraction(int(n), den): c for n, c in lattice.items()})
    return histogram, deviation, math.sqrt(best)


def imax_bruteforce(cb: Codebook, mode: Union[str, SweepMode] = SweepMode.EXACT,
                    threads: Optional[int] = None, guard: Optional[int] = None,
                    tile_rows: int = DEFAULT_TILE_ROWS) -> CorrelationReport:
    """Scan all N(N-1)/2 pairs."""
    mode = SweepMode(mode)
    started = time.perf_counter()
    if mode is SweepMode.EXACT:
        _check_guard(cb.N, guard or settings.exact_guard, mode)
        histogram = _exact_bruteforce(cb)
        return _finish_report((cb.N, cb.K), histogram, SweepMethod.BRUTE_FORCE, mode,
                              None, 0.0, started)
    _check_guard(cb.N, guard or settings.float_guard, mode)
    histogram, deviation, imax_float = _float_bruteforce(
        cb, settings.thread_count(threads), tile_rows, settings.tolerance)
    return _finish_report((cb.N, cb.K), histogram, SweepMethod.BRUTE_FORCE, mode,
                          imax_float, deviation, started)


# --- Symmetry reduction ---

DifferenceClass = Tuple[int, int, int]


def difference_classes(cb: Codebook) -> List[Tuple[DifferenceClass, int]]:
    """
    (da, db, du) with da in [0, p_min), weighted by the ordered pairs it covers.

    A class with da > 0 also stands for its negation, which has the conjugate
    correlation; classes with da = 0 already come in +/- pairs.
    """
    p, q = cb.p_min, cb.modulus
    classes = []
    for da in range(p):
        weight = 2 * (p - da) * q * q if da else p * q * q
        for db in range(q):
            for du in range(q):
                if da == db == du == 0:
                    continue
                classes.append(((da, db, du), weight))
    return classes


def _require_phase_structure(cb: Codebook):
    if not isinstance(cb, Codebook):
        raise ForeignCodebookError("symmetry reduction needs a codebook built by this library",
                                   got=type(cb).__name__)
    if cb.phase_count != cb.p_min * cb.modulus ** 2 or np.any(cb.phase_exponents[0] != 0):
        raise ForeignCodebookError("codebook lacks the (a, b, u) phase structure",
                                   phase_count=cb.phase_count)


def class_correlation(cb: Codebook, delta: DifferenceClass) -> CorrelationValue:
    """Correlation of any pair F_(a,b,u), F_(a-da, b-db, u-du)."""
    idx = cb.phase_index(*delta)
    word = cb.codeword(idx)
    counts = np.bincount(word.exponents.astype(np.int64), minlength=cb.modulus)
    norm = rational_norm_sq(cb.modulus, counts)
    float_mag = abs(np.sum(codeword_vector(word))) / math.sqrt(cb.K)
    return CorrelationValue(mag_sq=Fraction(norm, cb.K * cb.K), float_mag=float(float_mag))


def analytic_class_value(cb: Codebook, delta: DifferenceClass) -> Fraction:
    """
    Predicted |<.,.>|^2 of a difference class from the congruence argument.

    For da != 0 the sum over j vanishes except at the row i' with
    da*pi(i') + db = 0 (mod Q), unique since da < p_min is a unit; that row
    contributes Q. For da = 0 the sum vanishes unless db = 0, and then only the
    deleted row (construction two) is left over.
    """
    da, db, du = delta
    q, K = cb.modulus, cb.K
    if da:
        x = unique_solution(da, -db, q).value
        row = cb.pi.inverse()(x)
        hits = 0 if row == cb.deleted_row else 1
    elif db:
        hits = 0
    else:
        # sum_i xi^(du*sigma(i)) over all i is 0, so the kept rows give minus the deleted one
        hits = 0 if cb.deleted_row is None else 1
    return Fraction(hits * q * q, K * K)


def _class_weights(cb: Codebook) -> np.ndarray:
    """Ordered-pair weight of each phase row n >= 1 read as the class (da, db, du)."""
    p, q = cb.p_min, cb.modulus
    da = np.arange(1, cb.phase_count, dtype=np.int64) // (q * q)
    return np.where(da > 0, 2 * (p - da) * q * q, p * q * q)


def _class_counts(cb: Codebook, threads: int) -> np.ndarray:
    """Exponent histograms of phase rows 1..M-1, the class representatives against row 0."""
    q, M = cb.modulus, cb.phase_count
    E = cb.phase_exponents[1:]
    if threads == 1 or M - 1 <= SYMMETRY_CHUNK_ROWS:
        return _row_bincount(E, q)
    starts = range(0, M - 1, SYMMETRY_CHUNK_ROWS)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda s: _row_bincount(E[s:s + SYMMETRY_CHUNK_ROWS], q), starts))
    return np.concatenate(parts)


def _weighted_keys(keys: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct keys (rows of a 2-d array) with the summed weight of each."""
    axis = 0 if keys.ndim > 1 else None
    distinct, inverse = np.unique(keys, axis=axis, return_inverse=True)
    totals = np.bincount(inverse.reshape(-1), weights=weights, minlength=len(distinct))
    return distinct, np.rint(totals).astype(np.int64)


def imax_symmetry(cb: Codebook, mode: Union[str, SweepMode] = SweepMode.EXACT,
                  threads: Optional[int] = None) -> CorrelationReport:
    """
    One representative per difference class, plus the basis pairs in closed form.

    Phase row n = (da*Q + db)*Q + du against row 0 (all zeros) is the
    representative of class (da, db, du), so every class is read off one
    exponent histogram per row. Produces the same histogram as the brute-force
    sweep.
    """
    mode = SweepMode(mode)
    _require_phase_structure(cb)
    started = time.perf_counter()
    q, K, M = cb.modulus, cb.K, cb.phase_count
    den = K * K
    counts = _class_counts(cb, settings.thread_count(threads))
    weights = _class_weights(cb)

    ordered: Counter = Counter()
    deviation = 0.0
    if mode is SweepMode.EXACT:
        distinct, totals = _weighted_keys(counts, weights)
        for row, total in zip(distinct, totals.tolist()):
            ordered[Fraction(rational_norm_sq(q, row), den)] += total
        best = 0.0
    else:
        roots = np.exp(2j * np.pi * np.arange(q) / q)
        mag_sq = np.abs(counts @ roots) ** 2 / den
        numer, deviation = _lattice_snapper(den, settings.tolerance)(mag_sq)
        distinct, totals = _weighted_keys(numer, weights)
        for n, total in zip(distinct.tolist(), totals.tolist()):
            ordered[Fraction(n, den)] += total
        best = float(mag_sq.max()) if mag_sq.size else 0.0

    histogram: Counter = Counter()
    for key, count in ordered.items():
        if count % 2:
            raise ConsistencyError("odd ordered-pair count in a difference class", key=str(key))
        histogram[key] = count // 2

    histogram[Fraction(1, K)] += M * K
    histogram[Fraction(0)] += K * (K - 1) // 2
    imax_float = math.sqrt(max(best, 1.0 / K)) if mode is SweepMode.FLOAT else None
    return _finish_report((cb.N, cb.K), histogram, SweepMethod.SYMMETRY_REDUCED, mode,
                          imax_float, deviation, started)


# --- Generic vector sets ---

def report_from_vectors(vectors: Sequence[Sequence[complex]], max_denominator: int = 10 ** 6,
                        threads: Optional[int] = None,
                        tile_rows: int = DEFAULT_TILE_ROWS) -> CorrelationReport:
    """
    Float brute-force report for an arbitrary set of unit-norm vectors.

    Magnitudes are snapped to the nearest fraction with denominator at most
    max_denominator.
    """
    started = time.perf_counter()
    A = np.asarray(vectors, dtype=complex)
    require(A.ndim == 2 and A.shape[0] >= 2, "need at least two vectors of equal length",
            ErrorType.LENGTH_MISMATCH, shape=list(A.shape))
    norms = np.sum(np.abs(A) ** 2, axis=1)
    require(bool(np.all(np.abs(norms - 1) < settings.tolerance)), "vectors must have unit norm",
            norms=norms.tolist())

    snapped: Dict[float, Fraction] = {}

    def snap(mag_sq: np.ndarray) -> Tuple[np.ndarray, float]:
        keys = np.round(mag_sq, 12)
        deviation = 0.0
        for value in np.unique(keys):
            fraction = snapped.setdefault(float(value), Fraction(float(value)).limit_denominator(max_denominator))
            deviation = max(deviation, float(np.max(np.abs(mag_sq[keys == value] - float(fraction)))))
        return keys, deviation

    raw, deviation, best = _float_gram_histogram(A, snap, settings.thread_count(threads), tile_rows)
    histogram: Counter = Counter()
    for key, count in raw.items():
        histogram[snapped[float(key)]] += count
    return _finish_report((A.shape[0], A.shape[1]), histogram, SweepMethod.BRUTE_FORCE,
                          SweepMode.FLOAT, math.sqrt(best), deviation, started)


def is_mwbe(subject: Union[Codebook, CorrelationReport]) -> bool:
    """True iff every distinct pair meets the Welch bound with equality."""
    report = subject if isinstance(subject, CorrelationReport) else imax_bruteforce(subject)
    if report.N <= report.K:
        raise ParameterError(f"Welch-bound equality needs N > K, got N={report.N}, K={report.K}",
                             N=report.N, K=report.K)
    target = welch_bound(report.N, report.K).squared
    return set(report.histogram) == {target}


def compare_exact_float(exact: CorrelationReport, approx: CorrelationReport,
                        tolerance: Optional[float] = None) -> float:
    """
    Worst deviation between an exact and a float report; raises when they disagree.
    """
    tolerance = tolerance or settings.tolerance
    if not exact.same_result(approx):
        raise ConsistencyError("exact and float sweeps disagree",
                               exact_imax=str(exact.imax_exact), float_imax=str(approx.imax_exact))
    deviation = max(approx.max_deviation, abs(approx.imax_float ** 2 - float(exact.imax_exact)))
    if deviation > tolerance:
        raise ConsistencyError("float magnitudes deviate from exact values",
                               deviation=deviation, tolerance=tolerance)
    return deviation
