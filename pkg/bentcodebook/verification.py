"""
Invariant suite for built codebooks

Runs every property the constructions promise (sizes, unit norm, distinct
phase words, value sets, I_max, Welch sanity, path agreement) and reports
pass/fail per invariant instead of stopping at the first failure.
"""

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Union

from .analysis import (
    ERRATUM_NOTE,
    CorrelationReport,
    SweepMode,
    analytic_class_value,
    analytic_imax_sq,
    class_correlation,
    compare_exact_float,
    difference_classes,
    imax_bruteforce,
    imax_symmetry,
    stated_imax_sq_two,
    welch_bound,
)
from .config import settings
from .construction import (
    Codebook,
    ConstructionKind,
    build_codebook,
    codeword_norm_sq,
    construction_parameters,
    phase_words_distinct,
)
from .errors import CodebookError, ConsistencyError, GuardExceededError

logger = logging.getLogger(__name__)

# Exhaustive ell sweeps are limited to small moduli.
ELL_SWEEP_MAX_Q = 8
WELCH_SLACK = 1e-12


def _expect(condition: bool, message: str):
    if not condition:
        raise ConsistencyError(message)


class CheckStatus(str, Enum):
    PASSED = "passed"
    FAILED = "failed"
    SKIPPED = "skipped"


class VerifyMode(str, Enum):
    EXACT = "exact"
    FLOAT = "float"
    BOTH = "both"


@dataclass
class InvariantResult:
    name: str
    status: CheckStatus
    detail: str = ""
    elapsed_s: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status is not CheckStatus.FAILED

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "status": self.status.value, "detail": self.detail}


@dataclass
class VerificationReport:
    metadata: Dict[str, Any]
    results: List[InvariantResult] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failed(self) -> List[str]:
        return [r.name for r in self.results if r.status is CheckStatus.FAILED]

    def result(self, name: str) -> InvariantResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


class CodebookVerifier:
    """Checks a codebook against the guarantees of its construction."""

    def __init__(self, mode: Union[str, VerifyMode] = VerifyMode.EXACT,
                 threads: Optional[int] = None):
        self.mode = VerifyMode(mode)
        self.threads = threads
        self._reports: Dict[str, CorrelationReport] = {}

    def verify(self, cb: Codebook) -> VerificationReport:
        self._reports = {}
        report = VerificationReport(metadata=cb.metadata())
        checks: List[Callable[[Codebook], str]] = [
            self._check_cardinality,
            self._check_unit_norm,
            self._check_distinct_phase_words,
            self._check_class_values,
            self._check_value_set,
            self._check_imax,
            self._check_symmetry_matches_bruteforce,
            self._check_welch,
        ]
        if self.mode is VerifyMode.BOTH:
            checks.append(self._check_float_exact_agreement)
        if cb.construction is ConstructionKind.TWO:
            checks.append(self._check_ell_invariance)
            report.notes.append(ERRATUM_NOTE)

        for check in checks:
            report.results.append(self._run(check, cb))
        logger.info(f"Verified construction {cb.construction.number} at q={cb.modulus}: "
                    f"{'ok' if report.ok else 'failed ' + ', '.join(report.failed)}")
        return report

    def _run(self, check: Callable[[Codebook], str], cb: Codebook) -> InvariantResult:
        name = check.__name__.replace("_check_", "")
        started = time.perf_counter()
        try:
            detail = check(cb)
            status = CheckStatus.PASSED
        except GuardExceededError as exc:
            detail, status = exc.message, CheckStatus.SKIPPED
        except CodebookError as exc:
            detail, status = str(exc), CheckStatus.FAILED
        elapsed = time.perf_counter() - started
        logger.debug(f"invariant {name}: {status.value} ({detail})")
        return InvariantResult(name=name, status=status, detail=detail or "", elapsed_s=elapsed)

    # --- Sweeps, computed once per verify() ---

    def _exact_report(self, cb: Codebook) -> CorrelationReport:
        if "exact" not in self._reports:
            self._reports["exact"] = imax_bruteforce(cb, SweepMode.EXACT, threads=self.threads)
        return self._reports["exact"]

    def _float_report(self, cb: Codebook) -> CorrelationReport:
        if "float" not in self._reports:
            self._reports["float"] = imax_bruteforce(cb, SweepMode.FLOAT, threads=self.threads)
        return self._reports["float"]

    def _primary_report(self, cb: Codebook) -> CorrelationReport:
        if self.mode is VerifyMode.FLOAT:
            return self._float_report(cb)
        return self._exact_report(cb)

    # --- Invariants ---

    def _check_cardinality(self, cb: Codebook) -> str:
        p, N, K = construction_parameters(cb.construction, cb.modulus)
        _expect((cb.p_min, cb.N, cb.K) == (p, N, K),
                f"(p_min, N, K) = {(cb.p_min, cb.N, cb.K)}, expected {(p, N, K)}")
        _expect(cb.phase_count == p * cb.modulus ** 2, f"{cb.phase_count} phase words")
        return f"N={N}, K={K}"

    def _check_unit_norm(self, cb: Codebook) -> str:
        bad = [n for n in range(cb.N) if codeword_norm_sq(cb.codeword(n)) != 1]
        _expect(not bad, f"{len(bad)} codewords without unit norm, first {bad[:5]}")
        return f"{cb.N} codewords"

    def _check_distinct_phase_words(self, cb: Codebook) -> str:
        _expect(phase_words_distinct(cb), "two phase words coincide")
        return f"{cb.phase_count} distinct"

    def _check_class_values(self, cb: Codebook) -> str:
        mismatched = []
        for delta, _ in difference_classes(cb):
            observed = class_correlation(cb, delta).mag_sq
            if observed != analytic_class_value(cb, delta):
                mismatched.append(delta)
        _expect(not mismatched, f"{len(mismatched)} classes off the congruence prediction, first {mismatched[:3]}")
        return f"{len(difference_classes(cb))} classes"

    def _check_value_set(self, cb: Codebook) -> str:
        allowed = {Fraction(0), analytic_imax_sq(cb.construction, cb.modulus), cb.scale_sq}
        support = set(self._primary_report(cb).histogram)
        extra = support - allowed
        _expect(not extra, f"unexpected |<.,.>|^2 values {sorted(map(str, extra))}")
        return "support " + ", ".join(str(v) for v in sorted(support))

    def _check_imax(self, cb: Codebook) -> str:
        expected = analytic_imax_sq(cb.construction, cb.modulus)
        observed = self._primary_report(cb).imax_exact
        _expect(observed == expected, f"I_max^2 = {observed}, expected {expected}")
        if cb.construction is ConstructionKind.TWO:
            _expect(observed > stated_imax_sq_two(cb.modulus), "I_max does not exceed 1/sqrt(Q(Q-1))")
        return f"I_max^2 = {observed}"

    def _check_symmetry_matches_bruteforce(self, cb: Codebook) -> str:
        mode = SweepMode.FLOAT if self.mode is VerifyMode.FLOAT else SweepMode.EXACT
        reduced = imax_symmetry(cb, mode, threads=self.threads)
        full = self._primary_report(cb)
        _expect(reduced.same_result(full), "symmetry-reduced histogram differs from brute force")
        return f"{len(reduced.histogram)} distinct values"

    def _check_welch(self, cb: Codebook) -> str:
        report = self._primary_report(cb)
        bound = welch_bound(cb.N, cb.K).value
        _expect(report.imax_float >= bound - WELCH_SLACK, f"I_max {report.imax_float} below I_W {bound}")
        return f"I_max/I_W = {report.imax_float / bound:.6f}"

    def _check_float_exact_agreement(self, cb: Codebook) -> str:
        deviation = compare_exact_float(self._exact_report(cb), self._float_report(cb),
                                        settings.tolerance)
        return f"max deviation {deviation:.3e}"

    def _check_ell_invariance(self, cb: Codebook) -> str:
        if cb.modulus > ELL_SWEEP_MAX_Q:
            raise GuardExceededError(f"ell sweep limited to q <= {ELL_SWEEP_MAX_Q}", q=cb.modulus)
        reference = self._primary_report(cb).imax_exact
        for ell in range(cb.modulus):
            other = build_codebook(cb.construction, cb.q, cb.pi, cb.sigma, ell=ell)
            value = imax_symmetry(other, threads=self.threads).imax_exact
            _expect(value == reference, f"ell={ell}: I_max^2 = {value}, ell={cb.deleted_row}: {reference}")
        return f"all {cb.modulus} rows"


def verify_codebook(cb: Codebook, mode: Union[str, VerifyMode] = VerifyMode.EXACT,
                    threads: Optional[int] = None) -> VerificationReport:
    return CodebookVerifier(mode, threads).verify(cb)
