"""
Command-line interface for the sparse-solution uniqueness analyzer.

Usage examples:
  sparsecert analyze --matrix fixtures/remark23.csv --tie-tol 5e-4
  sparsecert spark --matrix fixtures/ex211.csv
  sparsecert scale --matrix fixtures/ex48.csv --rhs fixtures/ex48_b.csv --phi-b --no-exact
  sparsecert verify --matrix fixtures/ex54.csv --rhs fixtures/ex54_b.csv --x fixtures/ex54_x.csv

Exit codes: 0 success, 1 `verify` found no certificate, 2 input or usage error.
"""

import argparse
import logging
import math
import sys
import time
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .coherence import class_membership
from .config import AnalysisConfig, configure_logging
from .engine import AnalysisOptions, Conclusion, SystemInstance, UniquenessVerdict, evaluate
from .errors import SparseCertError
from .overlap import support_overlap
from .rangeprop import null_space_constant_exists, range_property_ii
from .report_models import (
    AnalysisReport,
    BabelModel,
    CoherenceModel,
    InputDescription,
    OverlapModel,
    RangePropertyModel,
    ScalingModel,
    SparkModel,
    report_from_verdict,
    report_to_json,
)
from .scaling import (
    ScaledCertificates,
    ScalingSpec,
    phi_diagonal_from_b,
    scaled_certificates,
    search_scaling,
    svd_scaling,
)
from .spark import SparkReport, spark_report
from .utils import FORMATS, parse_matrix, parse_vector

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INCONCLUSIVE = 1
EXIT_INPUT_ERROR = 2


def _fmt(value: Optional[float]) -> str:
    """Four decimals, the way the tables are printed."""
    if value is None:
        return "n/a"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return f"{value:.4f}"


def _half(value: Optional[float]) -> Optional[float]:
    return None if value is None else value / 2.0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--matrix", required=True, help="Path to the matrix A (CSV or JSON).")
    common.add_argument("--rhs", default=None, help="Path to the right-hand side b.")
    common.add_argument("--format", choices=FORMATS, default=None,
                        help="Input format; inferred from the file extension when omitted.")
    common.add_argument("--tie-tol", type=float, default=None, help="Coherence tie tolerance.")
    common.add_argument("--budget", type=int, default=None, help="Rank-test budget of the exact spark search.")
    common.add_argument("--seed", type=int, default=None, help="Seed of the scaling search.")
    common.add_argument("--gamma-star", type=int, default=None, help="Known lower bound on |S*|.")
    common.add_argument("--json", action="store_true", help="Write the JSON report to stdout.")
    common.add_argument("--exact", action=argparse.BooleanOptionalAction, default=None,
                        help="Run the exact spark search (default: on, off for `bounds`).")
    common.add_argument("--scaling", action="append", default=[], metavar="PATH",
                        help="Explicit scaling matrix W (repeatable).")
    common.add_argument("--phi-b", action="store_true", help="Evaluate the diagonal scaling built from b.")
    common.add_argument("--svd", action="store_true", help="Evaluate the SVD scaling Sigma^-1 U^T.")
    common.add_argument("--search-trials", type=int, default=None, help="Random trials of the scaling search.")
    common.add_argument("--zero-tol", type=float, default=None, help="Zero tolerance when counting nonzeros.")
    common.add_argument("--log-level", default=None, help="Logging level (DEBUG, INFO, WARNING, ...).")

    parser = argparse.ArgumentParser(
        prog="sparsecert",
        description="Certificates for the uniqueness of sparsest solutions of Ax = b.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", parents=[common], help="Full analysis report.")
    analyze.add_argument("--k", type=int, default=None, help="Also check the order-k range properties.")
    analyze.add_argument("--x", default=None, help="Optional candidate solution.")
    sub.add_parser("spark", parents=[common], help="Exact spark and its lower bounds.")
    sub.add_parser("bounds", parents=[common], help="Coherence and Babel thresholds only.")
    sub.add_parser("scale", parents=[common], help="Certificates under the requested scalings.")
    sub.add_parser("overlap", parents=[common], help="Support overlap S* and its spark criterion.")
    rangeprop = sub.add_parser("rangeprop", parents=[common], help="Range property of order k.")
    rangeprop.add_argument("--k", type=int, required=True, help="Order k.")
    verify = sub.add_parser("verify", parents=[common], help="Verdict for a candidate solution.")
    verify.add_argument("--x", required=True, help="Path to the candidate solution x.")
    return parser


class _Session:
    """Parsed inputs and settings shared by every subcommand."""

    def __init__(self, args: argparse.Namespace, config: AnalysisConfig):
        self.args = args
        self.config = config
        self.timings: Dict[str, float] = {}
        self.A = self.timed("parse", lambda: parse_matrix(args.matrix, args.format))
        self.b = parse_vector(args.rhs, args.format, self.A.rows) if args.rhs else None
        candidate_path = getattr(args, "x", None)
        self.x = parse_vector(candidate_path, args.format, self.A.cols) if candidate_path else None
        self.tie_tol = args.tie_tol if args.tie_tol is not None else config.tie_tolerance
        self.budget = args.budget if args.budget is not None else config.spark_budget
        self.seed = args.seed if args.seed is not None else config.seed
        self.trials = args.search_trials if args.search_trials is not None else config.search_trials
        default_exact = args.command != "bounds"
        self.want_exact = args.exact if args.exact is not None else default_exact

    def timed(self, name: str, fn):
        start = time.perf_counter()
        try:
            return fn()
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - start

    def rhs_or_zero(self) -> np.ndarray:
        if self.b is None:
            logger.info("no right-hand side given; using b = 0")
            return np.zeros(self.A.rows)
        return self.b

    def explicit_scalings(self) -> List[ScalingSpec]:
        specs = []
        for index, path in enumerate(self.args.scaling):
            W = parse_matrix(path, self.args.format)
            specs.append(ScalingSpec.explicit(W.array, label=f"W{index}"))
        return specs

    def options(self, range_k: Optional[int] = None, include_phi_b: Optional[bool] = None) -> AnalysisOptions:
        return AnalysisOptions.from_config(
            self.config,
            tie_tol=self.tie_tol,
            want_exact=self.want_exact,
            budget=self.budget,
            include_phi_b=self.args.phi_b if include_phi_b is None else include_phi_b,
            include_svd=self.args.svd,
            search_trials=self.trials,
            seed=self.seed,
            range_property_k=range_k,
            zero_tol=self.args.zero_tol,
        )

    def description(self) -> InputDescription:
        return InputDescription(
            matrix_path=self.args.matrix,
            rhs_path=self.args.rhs,
            candidate_path=getattr(self.args, "x", None),
            rows=self.A.rows,
            cols=self.A.cols,
            tie_tolerance=self.tie_tol,
            seed=self.seed,
        )


# ---------------------------------------------------------------- printing

def _print_header(title: str):
    print(f"\n🔎 {title}")
    print("=" * 60)


def _print_spark(report: SparkReport):
    s = report.summary
    if s is not None:
        _print_header("Coherence")
        print(f"   mu = {_fmt(s.mu)}   mu2 = {_fmt(s.mu2)}   alpha = {s.alpha}   beta = {s.beta}")
        try:
            print(f"   class: {class_membership(s).value}")
        except SparseCertError as e:
            print(f"   ⚠️  class: {e}")
    if report.profile is not None:
        print(f"   q_hat = {report.profile.q_hat}   q_star = {report.profile.q_star}")

    _print_header("Spark")
    if report.exact_is_infinite:
        print("   exact: inf (columns linearly independent)")
    elif report.exact is not None:
        print(f"   exact: {report.exact}   witness: {list(report.witness)}")
    elif report.partial_lower_bound is not None:
        print(f"   ⚠️  exact search stopped; certified spark >= {report.partial_lower_bound}")
    print(f"   {'bound':<18}{'value':>10}{'half':>10}")
    for name, value in report.lower_bounds():
        print(f"   {name:<18}{_fmt(value):>10}{_fmt(_half(value)):>10}")
    print(f"   best certified: {_fmt(report.best_certified)}")
    for d in report.diagnostics:
        print(f"   ⚠️  {d}")


def _print_scaled(certs: Sequence[ScaledCertificates]):
    for c in certs:
        _print_header(f"Scaling {c.spec.label} ({c.spec.kind.value}, cond = {c.spec.condition_number:.4g})")
        s = c.summary
        if s is not None:
            print(f"   mu_W = {_fmt(s.mu)}   mu2_W = {_fmt(s.mu2)}   alpha_W = {s.alpha}   beta_W = {s.beta}")
        if c.spec.mu_upper_bound is not None:
            print(f"   best-found mu_W (upper bound on the optimum): {_fmt(c.spec.mu_upper_bound)}")
        for name, (unscaled, scaled) in c.comparison.items():
            if scaled is None:
                continue
            delta = c.delta(name)
            print(f"   {name:<16} half {_fmt(_half(scaled)):>8}  (unscaled {_fmt(_half(unscaled))},"
                  f" delta {_fmt(_half(delta))})")


def _print_verdict(verdict: UniquenessVerdict):
    _print_header("Criteria")
    for c in verdict.criteria:
        if not c.applicable:
            marker = "⚠️ "
        elif c.passed:
            marker = "✅"
        else:
            marker = "❌" if verdict.sparsity is not None else "  "
        relation = "<=" if c.inclusive else "<"
        print(f"   {marker} {c.name:<38} {relation} {_fmt(c.threshold):>8}")
        if c.diagnostic and not c.passed:
            print(f"        {c.diagnostic}")
    if verdict.overlap is not None:
        print(f"\n   S* = {list(verdict.overlap.indices)}")
    if verdict.sparsity is not None:
        print(f"\n   ||x||_0 = {verdict.sparsity}")
    if verdict.conclusion is Conclusion.UNIQUE_SPARSEST:
        names = ", ".join(c.name for c in verdict.passing)
        print(f"\n✅ Unique sparsest solution (certified by {names})")
    else:
        print("\n❌ Inconclusive: no criterion certifies uniqueness")


# ---------------------------------------------------------------- commands

def _emit(session: _Session, report: AnalysisReport):
    if session.args.json:
        print(report_to_json(report))


def _cmd_evaluate(session: _Session, range_k: Optional[int]) -> int:
    instance = SystemInstance(
        session.A,
        session.rhs_or_zero(),
        candidate=session.x,
        gamma_star=session.args.gamma_star,
        scalings=tuple(session.explicit_scalings()),
    )
    include_phi_b = session.args.phi_b and session.b is not None
    verdict = session.timed("evaluate", lambda: evaluate(instance, session.options(range_k, include_phi_b)))
    if session.args.json:
        _emit(session, report_from_verdict(session.args.command, session.description(), verdict, session.timings))
    else:
        _print_spark(verdict.report)
        _print_scaled(verdict.scaled)
        _print_verdict(verdict)

    if session.args.command == "verify" and verdict.conclusion is not Conclusion.UNIQUE_SPARSEST:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_spark(session: _Session) -> int:
    report = session.timed("spark", lambda: spark_report(session.A, session.tie_tol, session.want_exact,
                                                        session.budget))
    if session.args.json:
        _emit(session, AnalysisReport(
            command=session.args.command,
            input=session.description(),
            coherence=CoherenceModel.from_summary(report.summary) if report.summary is not None else None,
            babel=BabelModel.from_profile(report.profile) if report.profile is not None else None,
            spark=SparkModel.from_report(report),
            timings=session.timings,
        ))
    else:
        _print_spark(report)
    return EXIT_OK


def _cmd_scale(session: _Session) -> int:
    specs = session.explicit_scalings()
    if session.args.phi_b:
        if session.b is None:
            raise SparseCertError("--phi-b needs --rhs")
        specs.append(phi_diagonal_from_b(session.b))
    if session.args.svd:
        specs.append(svd_scaling(session.A))
    if session.trials > 0:
        specs.append(session.timed("search", lambda: search_scaling(session.A, session.trials, session.seed)))
    if not specs:
        raise SparseCertError("no scaling requested: use --scaling, --phi-b, --svd or --search-trials")

    baseline = spark_report(session.A, session.tie_tol, session.want_exact, session.budget)
    certs = [
        session.timed("scaling", lambda spec=spec: scaled_certificates(
            session.A, spec, session.tie_tol, session.want_exact, session.budget, baseline=baseline))
        for spec in specs
    ]
    if session.args.json:
        _emit(session, AnalysisReport(
            command="scale",
            input=session.description(),
            spark=SparkModel.from_report(baseline),
            scalings=[ScalingModel.from_certificates(c) for c in certs],
            timings=session.timings,
        ))
    else:
        _print_spark(baseline)
        _print_scaled(certs)
    return EXIT_OK


def _cmd_overlap(session: _Session) -> int:
    if session.b is None:
        raise SparseCertError("overlap needs --rhs")
    overlap = session.timed("overlap", lambda: support_overlap(session.A, session.b))
    report = spark_report(session.A, session.tie_tol, session.want_exact, session.budget)
    spark_value = float(report.exact) if report.exact is not None else report.best_certified
    threshold = (overlap.cardinality + spark_value) / 2.0
    if session.args.json:
        _emit(session, AnalysisReport(
            command="overlap",
            input=session.description(),
            spark=SparkModel.from_report(report),
            overlap=OverlapModel.from_overlap(overlap),
            timings=session.timings,
        ))
    else:
        _print_header("Support overlap")
        print(f"   S* = {list(overlap.indices)}   |S*| = {overlap.cardinality}")
        print(f"   spark value used: {_fmt(spark_value)}")
        print(f"   unique below ||x||_0 < {_fmt(threshold)}")
    return EXIT_OK


def _cmd_rangeprop(session: _Session) -> int:
    k = session.args.k
    certificate = session.timed("rangeprop", lambda: range_property_ii(session.A, k, session.config.lp_pair_budget))
    independent = null_space_constant_exists(session.A, k, session.budget)
    if session.args.json:
        _emit(session, AnalysisReport(
            command="rangeprop",
            input=session.description(),
            range_property=RangePropertyModel.from_certificate(certificate, session.A.cols),
            timings=session.timings,
        ))
    else:
        _print_header(f"Range property of order {k}")
        marker = "✅" if certificate.holds else "❌"
        print(f"   {marker} holds: {certificate.holds}   patterns: {len(certificate.margins)}")
        if certificate.failing_pair is not None:
            positive, negative = certificate.failing_pair
            print(f"   failing pattern: +{list(positive)} -{list(negative)}")
        print(f"   worst margin t = {_fmt(certificate.worst_margin)}")
        marker = "✅" if independent else "❌"
        print(f"   {marker} every {k} columns independent: {independent}")
    return EXIT_OK


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run one subcommand, and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR

    try:
        config = AnalysisConfig()
    except ValueError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    configure_logging(args.log_level or config.log_level)

    try:
        session = _Session(args, config)
        if args.command in ("analyze", "verify"):
            return _cmd_evaluate(session, getattr(args, "k", None))
        if args.command in ("spark", "bounds"):
            return _cmd_spark(session)
        if args.command == "scale":
            return _cmd_scale(session)
        if args.command == "overlap":
            return _cmd_overlap(session)
        if args.command == "rangeprop":
            return _cmd_rangeprop(session)
    except (SparseCertError, ValueError, OSError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    parser.print_usage(sys.stderr)
    return EXIT_INPUT_ERROR


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
