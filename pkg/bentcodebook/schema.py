"""
Input and report models for bentcodebook

Codebook spec files, CLI run configurations and the JSON payloads the CLI
emits. Exact rationals travel as numerator/denominator strings.
"""

import json
import logging
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .analysis import CorrelationReport, RatioReport
from .construction import Codebook, ConstructionKind, build_codebook
from .errors import SpecError
from .gbf import (
    BentnessReport,
    FunctionZQ,
    PermutationZQ,
    affine_function,
    affine_permutation,
    constant_function,
    identity_permutation,
    random_function,
    random_permutation,
)
from .ntheory import Modulus
from .tables import TableRow
from .verification import VerificationReport

logger = logging.getLogger(__name__)

MapSpec = Union[str, List[int]]


class Command(str, Enum):
    BUILD = "build"
    IMAX = "imax"
    WELCH = "welch"
    TABLE = "table"
    GBF_CHECK = "gbf-check"
    VERIFY = "verify"


class ModeOption(str, Enum):
    EXACT = "exact"
    FLOAT = "float"
    BOTH = "both"


class MethodOption(str, Enum):
    BRUTE = "brute"
    SYMMETRY = "symmetry"
    BOTH = "both"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


# --- Permutation and function specs ---

def _load_list(text: str) -> Optional[List[int]]:
    """A JSON array given inline or as a path to a file holding one."""
    stripped = text.strip()
    if stripped.startswith("["):
        raw = stripped
    else:
        path = Path(stripped)
        if not path.is_file():
            return None
        raw = path.read_text()
    try:
        values = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SpecError(f"cannot parse {text!r} as a JSON array: {exc}", spec=text) from exc
    if not isinstance(values, list) or not all(isinstance(v, int) for v in values):
        raise SpecError(f"{text!r} is not a JSON array of integers", spec=text)
    return values


def _split_args(body: str, spec: str, count: int) -> List[int]:
    try:
        values = [int(v) for v in body.split(",")]
    except ValueError:
        raise SpecError(f"bad arguments in {spec!r}", spec=spec) from None
    if len(values) != count:
        raise SpecError(f"{spec!r} needs {count} integer arguments", spec=spec)
    return values


def resolve_permutation(spec: MapSpec, q: Union[int, Modulus], seed: Optional[int] = None) -> PermutationZQ:
    """
    identity | affine:c,d | random:SEED | random (uses seed) | JSON list | file path
    """
    modulus = Modulus.of(q)
    if isinstance(spec, list):
        return PermutationZQ(modulus, spec)
    text = spec.strip()
    name, _, body = text.partition(":")
    name = name.lower()
    if name == "identity":
        return identity_permutation(modulus)
    if name == "affine":
        c, d = _split_args(body, text, 2)
        return affine_permutation(modulus, c, d)
    if name == "random":
        if body:
            return random_permutation(modulus, _split_args(body, text, 1)[0])
        if seed is None:
            raise SpecError("random permutations need an explicit seed", spec=text)
        return random_permutation(modulus, seed)
    values = _load_list(text)
    if values is None:
        raise SpecError(f"unknown permutation spec {text!r}", spec=text)
    return PermutationZQ(modulus, values)


def resolve_function(spec: MapSpec, q: Union[int, Modulus], seed: Optional[int] = None) -> FunctionZQ:
    """
    Functions of one variable: zero | constant:v | identity | affine:c,d |
    random:SEED | random | JSON list | file path.
    """
    modulus = Modulus.of(q)
    if isinstance(spec, list):
        return FunctionZQ(modulus, 1, spec)
    text = spec.strip()
    name, _, body = text.partition(":")
    name = name.lower()
    if name == "zero":
        return constant_function(modulus)
    if name == "constant":
        return constant_function(modulus, _split_args(body, text, 1)[0])
    if name == "identity":
        return affine_function(modulus, 1, 0)
    if name == "affine":
        c, d = _split_args(body, text, 2)
        return affine_function(modulus, c, d)
    if name == "random":
        if body:
            return random_function(modulus, _split_args(body, text, 1)[0])
        if seed is None:
            raise SpecError("random functions need an explicit seed", spec=text)
        return random_function(modulus, seed)
    values = _load_list(text)
    if values is None:
        raise SpecError(f"unknown function spec {text!r}", spec=text)
    return FunctionZQ(modulus, 1, values)


def load_function_table(spec: str, q: int, m: int) -> FunctionZQ:
    """A full value table of f: Z_Q^m -> Z_Q, inline JSON or a file path."""
    values = _load_list(spec)
    if values is None:
        raise SpecError(f"function table {spec!r} is neither a JSON array nor a file", spec=spec)
    return FunctionZQ(Modulus(q), m, values)


# --- Codebook spec files ---

class CodebookSpec(BaseModel):
    construction: int
    q: int = Field(ge=2)
    pi: MapSpec = "identity"
    sigma: MapSpec = "identity"
    ell: int = 0
    seed: Optional[int] = None

    @field_validator("construction")
    @classmethod
    def _known_construction(cls, value: int) -> int:
        if value not in (1, 2):
            raise ValueError(f"construction must be 1 or 2, got {value}")
        return value

    @model_validator(mode="after")
    def _check_ranges(self) -> "CodebookSpec":
        if self.construction == 2:
            if self.q < 3:
                raise ValueError(f"construction 2 needs q >= 3, got {self.q}")
            if not 0 <= self.ell < self.q:
                raise ValueError(f"ell must lie in [0, {self.q}), got {self.ell}")
        return self

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "CodebookSpec":
        path = Path(path)
        try:
            return cls.model_validate_json(path.read_text())
        except FileNotFoundError:
            raise SpecError(f"spec file {path} not found", path=str(path)) from None
        except ValidationError as exc:
            raise SpecError(f"invalid codebook spec {path}: {exc.errors(include_url=False)}",
                            path=str(path)) from None

    def permutations(self):
        pi = resolve_permutation(self.pi, self.q, self.seed)
        # a bare "random" sigma draws from the next seed so that pi != sigma
        sigma_seed = None if self.seed is None else self.seed + 1
        sigma = resolve_permutation(self.sigma, self.q, sigma_seed)
        return pi, sigma

    def build(self, build_guard: Optional[int] = None) -> Codebook:
        pi, sigma = self.permutations()
        cb = build_codebook(self.construction, self.q, pi, sigma, ell=self.ell, build_guard=build_guard)
        cb.metadata_extra["seed"] = self.seed
        return cb


# --- Run configuration ---

class RunConfig(BaseModel):
    command: Command
    construction: int = 1
    q: Optional[int] = None
    q_list: List[int] = Field(default_factory=list)
    pi: MapSpec = "identity"
    sigma: MapSpec = "identity"
    ell: int = 0
    seed: Optional[int] = None
    spec: Optional[str] = None
    mode: ModeOption = ModeOption.EXACT
    method: MethodOption = MethodOption.BOTH
    output: OutputFormat = OutputFormat.JSON
    out: Optional[str] = None
    export: Optional[str] = None
    threads: Optional[int] = Field(default=None, ge=1)
    sweep: bool = False
    # gbf-check
    function: Optional[str] = None
    m: int = Field(default=2, ge=1, le=2)
    kumar: bool = False
    omega: MapSpec = "identity"
    theta: MapSpec = "zero"
    # welch
    N: Optional[int] = None
    K: Optional[int] = None

    @field_validator("construction")
    @classmethod
    def _known_construction(cls, value: int) -> int:
        if value not in (1, 2):
            raise ValueError(f"construction must be 1 or 2, got {value}")
        return value

    @model_validator(mode="after")
    def _check_command(self) -> "RunConfig":
        minimum = 3 if self.construction == 2 else 2
        needs_codebook = self.command in (Command.BUILD, Command.IMAX, Command.VERIFY)
        if needs_codebook and self.spec is None and self.q is None:
            raise ValueError(f"{self.command.value} needs --q or --spec")
        if self.q is not None and self.spec is None and self.command is not Command.GBF_CHECK:
            if self.q < minimum:
                raise ValueError(f"construction {self.construction} needs q >= {minimum}, got {self.q}")
            if self.construction == 2 and not 0 <= self.ell < self.q:
                raise ValueError(f"ell must lie in [0, {self.q}), got {self.ell}")
        if self.command is Command.TABLE:
            bad = [q for q in self.q_list if q < minimum]
            if not self.q_list:
                raise ValueError("table needs at least one q")
            if bad:
                raise ValueError(f"construction {self.construction} needs q >= {minimum}, got {bad}")
        if self.command is Command.GBF_CHECK:
            if self.q is None or self.q < 2:
                raise ValueError("gbf-check needs --q >= 2")
            if not self.kumar and self.function is None:
                raise ValueError("gbf-check needs --function or --kumar")
        if self.command is Command.WELCH and self.q is None and (self.N is None or self.K is None):
            raise ValueError("welch needs --q or both --N and --K")
        return self

    def codebook_spec(self) -> CodebookSpec:
        if self.spec:
            return CodebookSpec.from_file(self.spec)
        return CodebookSpec(construction=self.construction, q=self.q, pi=self.pi,
                            sigma=self.sigma, ell=self.ell, seed=self.seed)


# --- Report payloads ---

class RationalModel(BaseModel):
    numerator: str
    denominator: str

    @classmethod
    def of(cls, value: Fraction) -> "RationalModel":
        value = Fraction(value)
        return cls(numerator=str(value.numerator), denominator=str(value.denominator))


class HistogramEntry(BaseModel):
    mag_sq: RationalModel
    magnitude: float
    pairs: int


class CorrelationPayload(BaseModel):
    ok: bool = True
    N: int
    K: int
    method: str
    mode: str
    imax_sq: RationalModel
    imax: float
    imax_float: float
    welch_bound: float
    ratio: float
    pair_count: int
    max_deviation: float
    histogram: List[HistogramEntry]
    notes: List[str] = Field(default_factory=list)

    @classmethod
    def of(cls, report: CorrelationReport) -> "CorrelationPayload":
        return cls(
            N=report.N, K=report.K, method=report.method.value, mode=report.mode.value,
            imax_sq=RationalModel.of(report.imax_exact), imax=report.imax,
            imax_float=report.imax_float, welch_bound=report.welch_bound, ratio=report.ratio,
            pair_count=report.pair_count, max_deviation=report.max_deviation,
            histogram=[HistogramEntry(mag_sq=RationalModel.of(v), magnitude=float(v) ** 0.5, pairs=n)
                       for v, n in sorted(report.histogram.items())],
            notes=list(report.notes),
        )


class RatioPayload(BaseModel):
    ok: bool = True
    construction: int
    p_min: int
    q: int
    N: int
    K: int
    welch_sq: RationalModel
    welch_bound: float
    imax_sq: RationalModel
    imax: float
    imax_over_iw: float
    iw_over_imax: float
    limit_p_to_infinity: float
    limit_q_to_infinity: float
    variant_imax: Optional[float] = None
    variant_imax_over_iw: Optional[float] = None
    variant_iw_over_imax: Optional[float] = None
    notes: List[str] = Field(default_factory=list)

    @classmethod
    def of(cls, report: RatioReport) -> "RatioPayload":
        return cls(
            construction=report.construction.number, p_min=report.p_min, q=report.q,
            N=report.N, K=report.K, welch_sq=RationalModel.of(report.welch_sq),
            welch_bound=report.welch_bound, imax_sq=RationalModel.of(report.imax_sq),
            imax=report.imax, imax_over_iw=report.imax_over_iw, iw_over_imax=report.iw_over_imax,
            limit_p_to_infinity=report.limit_p_to_infinity,
            limit_q_to_infinity=report.limit_q_to_infinity,
            variant_imax=report.variant_imax, variant_imax_over_iw=report.variant_imax_over_iw,
            variant_iw_over_imax=report.variant_iw_over_imax, notes=list(report.notes),
        )


class TablePayload(BaseModel):
    ok: bool = True
    construction: int
    columns: List[str]
    rows: List[Dict[str, Any]]

    @classmethod
    def of(cls, construction: ConstructionKind, columns: List[str], rows: List[TableRow]) -> "TablePayload":
        return cls(construction=construction.number, columns=columns, rows=[r.to_dict() for r in rows])


class BentnessPayload(BaseModel):
    ok: bool = True
    q: int
    m: int
    is_bent: bool
    parseval_total: int
    failing_points: List[List[int]]
    max_magnitude_deviation: float

    @classmethod
    def of(cls, report: BentnessReport) -> "BentnessPayload":
        deviation = max((abs(e.magnitude - 1.0) for e in report.entries), default=0.0)
        return cls(q=report.q, m=report.m, is_bent=report.is_bent,
                   parseval_total=report.parseval_total,
                   failing_points=[list(a) for a in report.failing_points],
                   max_magnitude_deviation=deviation)


class VerificationPayload(BaseModel):
    ok: bool
    metadata: Dict[str, Any]
    invariants: List[Dict[str, Any]]
    notes: List[str] = Field(default_factory=list)

    @classmethod
    def of(cls, report: VerificationReport) -> "VerificationPayload":
        return cls(ok=report.ok, metadata=report.metadata,
                   invariants=[r.to_dict() for r in report.results], notes=list(report.notes))


class BuildPayload(BaseModel):
    ok: bool = True
    metadata: Dict[str, Any]
    export: Optional[str] = None
