"""
Command-line interface for bentcodebook

    python -m bentcodebook table --construction 1 --q 35,221,493
    python -m bentcodebook imax --construction 1 --q 2 --pi identity --sigma identity
    python -m bentcodebook verify --construction 2 --q 6 --ell 2 --mode both

Reports go to stdout (or --out); logs and structured errors go to stderr.
Exit status: 0 success, 1 a consistency check failed, 2 invalid input.
"""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import ValidationError

from .analysis import (
    ERRATUM_NOTE,
    CorrelationReport,
    SweepMode,
    check_specialized_welch,
    compare_exact_float,
    imax_bruteforce,
    imax_symmetry,
    ratio_report,
    welch_bound,
)
from .config import settings
from .construction import ConstructionKind, export_codebook
from .errors import DEFAULT_EXIT_CODE, CodebookError, ConsistencyError, SpecError
from .gbf import is_generalized_bent, make_kumar_gbf
from .schema import (
    BentnessPayload,
    BuildPayload,
    Command,
    CorrelationPayload,
    MethodOption,
    ModeOption,
    OutputFormat,
    RatioPayload,
    RationalModel,
    RunConfig,
    TablePayload,
    VerificationPayload,
    load_function_table,
    resolve_function,
    resolve_permutation,
)
from .tables import TABLE_COLUMNS, format_sig, format_text, table_rows, write_csv
from .verification import CodebookVerifier

logger = logging.getLogger(__name__)


# --- Argument parsing ---

def _q_values(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers separated by commas, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--construction", type=int, default=1, choices=[1, 2])
    common.add_argument("--q", type=_q_values, help="Q, or a comma-separated list for table")
    common.add_argument("--pi", default="identity",
                        help="identity | affine:c,d | random:SEED | random | JSON list | file")
    common.add_argument("--sigma", default="identity", help="same forms as --pi")
    common.add_argument("--ell", type=int, default=0, help="deleted row for construction 2")
    common.add_argument("--seed", type=int, help="seed for bare 'random' specs")
    common.add_argument("--spec", help="JSON codebook spec file")
    common.add_argument("--mode", default="exact", choices=[m.value for m in ModeOption])
    common.add_argument("--output", default="json", choices=[o.value for o in OutputFormat])
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    common.add_argument("--log-level", default=None, help="overrides LOG_LEVEL")

    parser = argparse.ArgumentParser(
        prog="bentcodebook",
        description="Codebooks from generalised bent functions and their Welch-bound optimality.")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", parents=[common], help="build a codebook")
    build.add_argument("--export", help="dump the exponent table (.csv or .npz)")

    imax = sub.add_parser("imax", parents=[common], help="maximum correlation of a codebook")
    imax.add_argument("--method", default="both", choices=[m.value for m in MethodOption])

    welch = sub.add_parser("welch", parents=[common], help="Welch bound and optimality ratio")
    welch.add_argument("--N", type=int, dest="N")
    welch.add_argument("--K", type=int, dest="K")

    table = sub.add_parser("table", parents=[common], help="parameter table rows")
    table.add_argument("--sweep", action="store_true", help="sweep rows within the float guard")

    gbf = sub.add_parser("gbf-check", parents=[common], help="decide generalised bentness")
    gbf.add_argument("--function", help="value table of f as a JSON list or file")
    gbf.add_argument("--m", type=int, default=2, help="arity of --function (1 or 2)")
    gbf.add_argument("--kumar", action="store_true", help="check x2*omega(x1) + theta(x1)")
    gbf.add_argument("--omega", default="identity", help="permutation spec for omega")
    gbf.add_argument("--theta", default="zero",
                     help="zero | constant:v | identity | affine:c,d | random:SEED | JSON list")

    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    q_values = args.q or []
    fields = {
        "command": args.command,
        "construction": args.construction,
        "pi": args.pi,
        "sigma": args.sigma,
        "ell": args.ell,
        "seed": args.seed,
        "spec": args.spec,
        "mode": args.mode,
        "output": args.output,
        "out": args.out,
        "threads": args.threads,
    }
    if args.command == Command.TABLE.value:
        fields["q_list"] = q_values
        fields["sweep"] = args.sweep
    else:
        if len(q_values) > 1:
            raise SpecError(f"{args.command} takes a single --q, got {q_values}", q=q_values)
        fields["q"] = q_values[0] if q_values else None
    if args.command == Command.IMAX.value:
        fields["method"] = args.method
    if args.command == Command.BUILD.value:
        fields["export"] = args.export
    if args.command == Command.WELCH.value:
        fields["N"], fields["K"] = args.N, args.K
    if args.command == Command.GBF_CHECK.value:
        fields.update(function=args.function, m=args.m, kumar=args.kumar,
                      omega=args.omega, theta=args.theta)
    try:
        return RunConfig(**fields)
    except ValidationError as exc:
        messages = "; ".join(err["msg"] for err in exc.errors(include_url=False))
        raise SpecError(f"invalid arguments: {messages}", command=args.command) from None


# --- Rendering ---

def _csv_text(header: List[str], rows: List[List]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().rstrip("\n")


def _correlation_text(report: CorrelationReport) -> str:
    lines = [
        f"{report.method.value} / {report.mode.value}: N={report.N}, K={report.K}",
        f"  I_max^2 = {report.imax_exact}  (I_max = {report.imax:.10g}, float {report.imax_float:.10g})",
        f"  I_W = {report.welch_bound:.10g}, I_max/I_W = {report.ratio:.10g}",
    ]
    for value, count in sorted(report.histogram.items()):
        lines.append(f"  |<c_i, c_j>|^2 = {value}: {count} pairs")
    lines.extend(f"  note: {n}" for n in report.notes)
    return "\n".join(lines)


# --- Commands ---

def _run_build(config: RunConfig) -> Tuple[str, int]:
    cb = config.codebook_spec().build()
    exported = str(export_codebook(cb, config.export)) if config.export else None
    meta = cb.metadata()
    if config.output is OutputFormat.JSON:
        return BuildPayload(metadata=meta, export=exported).model_dump_json(indent=2), 0
    if config.output is OutputFormat.CSV:
        return _csv_text(["key", "value"], [[k, json.dumps(v)] for k, v in meta.items()]), 0
    return "\n".join(f"{k}: {v}" for k, v in meta.items()), 0


def _run_imax(config: RunConfig) -> Tuple[str, int]:
    cb = config.codebook_spec().build()
    modes = [SweepMode.EXACT, SweepMode.FLOAT] if config.mode is ModeOption.BOTH else [SweepMode(config.mode.value)]
    methods = {
        MethodOption.BRUTE: [imax_bruteforce],
        MethodOption.SYMMETRY: [imax_symmetry],
        MethodOption.BOTH: [imax_bruteforce, imax_symmetry],
    }[config.method]

    reports: List[CorrelationReport] = []
    for method in methods:
        by_mode = [method(cb, mode, threads=config.threads) for mode in modes]
        if len(by_mode) == 2:
            compare_exact_float(by_mode[0], by_mode[1], settings.tolerance)
        reports.extend(by_mode)
    if any(not reports[0].same_result(r) for r in reports[1:]):
        raise ConsistencyError("sweeps disagree on the correlation histogram",
                               methods=[f"{r.method.value}/{r.mode.value}" for r in reports])
    if cb.construction is ConstructionKind.TWO:
        for r in reports:
            r.notes.append(ERRATUM_NOTE)

    if config.output is OutputFormat.JSON:
        payload = {"ok": True, "codebook": cb.metadata(),
                   "reports": [CorrelationPayload.of(r).model_dump() for r in reports]}
        return json.dumps(payload, indent=2), 0
    if config.output is OutputFormat.CSV:
        rows = []
        for r in reports:
            for value, count in sorted(r.histogram.items()):
                rows.append([r.method.value, r.mode.value, value.numerator, value.denominator,
                             float(value) ** 0.5, count])
        return _csv_text(["method", "mode", "mag_sq_numerator", "mag_sq_denominator",
                          "magnitude", "pairs"], rows), 0
    return "\n\n".join(_correlation_text(r) for r in reports), 0


def _run_welch(config: RunConfig) -> Tuple[str, int]:
    if config.q is None:
        bound = welch_bound(config.N, config.K)
        if config.output is OutputFormat.JSON:
            payload = {"ok": True, "N": bound.N, "K": bound.K,
                       "welch_sq": RationalModel.of(bound.squared).model_dump(),
                       "welch_bound": bound.value}
            return json.dumps(payload, indent=2), 0
        if config.output is OutputFormat.CSV:
            return _csv_text(["N", "K", "I_W"], [[bound.N, bound.K, format_sig(bound.value)]]), 0
        return f"I_W({bound.N}, {bound.K}) = sqrt({bound.squared}) = {bound.value:.10g}", 0

    report = ratio_report(config.construction, config.q)
    if not check_specialized_welch(config.construction, report.p_min, config.q):
        raise ConsistencyError("specialised Welch bound differs from (N-K)/((N-1)K)",
                               construction=config.construction, q=config.q)
    if config.output is OutputFormat.JSON:
        return RatioPayload.of(report).model_dump_json(indent=2), 0
    if config.output is OutputFormat.CSV:
        row = [report.p_min, report.q, report.N, report.K, format_sig(report.imax),
               format_sig(report.welch_bound), format_sig(report.iw_over_imax)]
        return _csv_text(TABLE_COLUMNS, [row]), 0
    lines = [
        f"construction {report.construction.number}: p_min={report.p_min}, Q={report.q}, "
        f"N={report.N}, K={report.K}",
        f"  I_W^2 = {report.welch_sq}  (I_W = {report.welch_bound:.10g})",
        f"  I_max = {report.imax:.10g}, I_max/I_W = {report.imax_over_iw:.10g}, "
        f"I_W/I_max = {report.iw_over_imax:.10g}",
        f"  limit as p_min grows: {report.limit_p_to_infinity}; "
        f"Q grows with p_min fixed: {report.limit_q_to_infinity:.10g}",
    ]
    if report.variant_imax is not None:
        lines.append(f"  with I_max = 1/sqrt(Q(Q-1)): I_max = {report.variant_imax:.10g}, "
                     f"I_W/I_max = {report.variant_iw_over_imax:.10g}")
    lines.extend(f"  note: {n}" for n in report.notes)
    return "\n".join(lines), 0


def _run_table(config: RunConfig) -> Tuple[str, int]:
    kind = ConstructionKind.parse(config.construction)
    rows = table_rows(kind, config.q_list, sweep=config.sweep, ell=config.ell, threads=config.threads)
    if config.output is OutputFormat.JSON:
        return TablePayload.of(kind, TABLE_COLUMNS, rows).model_dump_json(indent=2), 0
    if config.output is OutputFormat.CSV:
        buffer = io.StringIO()
        write_csv(rows, buffer)
        return buffer.getvalue().rstrip("\n"), 0
    return format_text(rows), 0


def _run_gbf_check(config: RunConfig) -> Tuple[str, int]:
    if config.kumar:
        omega = resolve_permutation(config.omega, config.q, config.seed)
        theta = resolve_function(config.theta, config.q, config.seed)
        f = make_kumar_gbf(omega, theta)
    else:
        f = load_function_table(config.function, config.q, config.m)
    report = is_generalized_bent(f, max_workers=config.threads)
    if config.output is OutputFormat.JSON:
        return BentnessPayload.of(report).model_dump_json(indent=2), 0
    if config.output is OutputFormat.CSV:
        rows = [[" ".join(map(str, e.a)), e.norm_sq, e.magnitude] for e in report.entries]
        return _csv_text(["a", "norm_sq", "magnitude"], rows), 0
    verdict = "bent" if report.is_bent else f"not bent ({len(report.failing_points)} failing points)"
    return f"f over Z_{report.q}^{report.m}: {verdict}; Parseval total {report.parseval_total}", 0


def _run_verify(config: RunConfig) -> Tuple[str, int]:
    cb = config.codebook_spec().build()
    report = CodebookVerifier(config.mode.value, config.threads).verify(cb)
    status = 0 if report.ok else 1
    if config.output is OutputFormat.JSON:
        return VerificationPayload.of(report).model_dump_json(indent=2), status
    if config.output is OutputFormat.CSV:
        rows = [[r.name, r.status.value, r.detail] for r in report.results]
        return _csv_text(["invariant", "status", "detail"], rows), status
    lines = [f"{r.status.value:>7}  {r.name}: {r.detail}" for r in report.results]
    lines.extend(f"note: {n}" for n in report.notes)
    return "\n".join(lines), status


HANDLERS = {
    Command.BUILD: _run_build,
    Command.IMAX: _run_imax,
    Command.WELCH: _run_welch,
    Command.TABLE: _run_table,
    Command.GBF_CHECK: _run_gbf_check,
    Command.VERIFY: _run_verify,
}


def run(config: RunConfig) -> int:
    """Execute one command and emit its report; returns the exit status."""
    logger.info(f"Running {config.command.value}")
    text, status = HANDLERS[config.command](config)
    if config.out:
        Path(config.out).write_text(text + "\n")
        logger.info(f"Report written to {config.out}")
    else:
        sys.stdout.write(text + "\n")
    return status


def _report_error(error: CodebookError) -> int:
    sys.stderr.write(json.dumps(error.to_dict(), indent=2) + "\n")
    return error.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = (args.log_level or settings.log_level).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return run(config_from_args(args))
    except CodebookError as exc:
        return _report_error(exc)
    except ValidationError as exc:
        return _report_error(SpecError(f"invalid input: {exc.errors(include_url=False)}"))
    except OSError as exc:
        logger.error(f"I/O failure: {exc}")
        sys.stderr.write(json.dumps({"ok": False, "error_type": "io_error", "error": str(exc)}) + "\n")
        return DEFAULT_EXIT_CODE
