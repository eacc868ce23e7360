"""Command-line front end: JSON-lines reports on stdout, summary on stderr."""

import argparse
import json
import logging
import sys
from fractions import Fraction

from bvextension import (
    GaugeFixingFermion,
    build_extended_space,
    build_S_BV,
    build_S_tilde,
    build_S_tot,
    build_total_space,
    gauge_fix,
    nonconforming_terms,
)
from antibracket import brst, check_cme
from bvtriples import (
    algebra_lemma_report,
    derivation_consistency_check,
    ko_dimension_report,
    verify_aux_action,
    verify_bv_action,
)
from expression_parser import ParseError, parse_expression, parse_univariate
from matrixmodel import GAUGE_FIELDS, ActionPolynomial, check_closed_form, classify, relations, spectral_action
from spectraltriple import check_mixed_ko, check_real_structure, load_triple
from superalgebra import FieldKind
from verification_report import Stopwatch, VerificationReport, condition, reports_to_jsonl
from verification_suites import DEFAULT_F, run_all_suites

logger = logging.getLogger("cli")


# ===================================================================
# ARGUMENT PARSING
# ===================================================================

def parse_rationals(text, count=None):
    try:
        values = tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"'{text}' is not a comma-separated list of rationals") from exc
    if count is not None and len(values) != count:
        raise ParseError(f"expected {count} values, got {len(values)} in '{text}'")
    return values


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--f", default=None, help="polynomial f(x) of the spectral action, e.g. 'x^2'")
    common.add_argument("--seed", type=int, default=0, help="seed of the random samples (default 0)")
    common.add_argument("--json", action="store_true", help="JSON lines only, no summary")
    return common


def _bv_parser():
    bv = argparse.ArgumentParser(add_help=False)
    bv.add_argument("--alpha", default="1,1,1", help="three nonzero rationals a1,a2,a3")
    bv.add_argument("--beta", default="1", help="nonzero rational")
    bv.add_argument("--T", dest="T", default="0", help="polynomial in M1..M4")
    return bv


def build_parser():
    common = _common_parser()
    bv_params = _bv_parser()
    parser = argparse.ArgumentParser(prog="bvengine", description="Exact BV verification engine for the U(2) matrix model")
    commands = parser.add_subparsers(dest="command", required=True)

    model = commands.add_parser("model", help="matrix model actions").add_subparsers(dest="action", required=True)
    model.add_parser("s0", parents=[common], help="spectral action tr f(M)")
    classify_cmd = model.add_parser("classify", parents=[common], help="GCD case of S0")
    classify_cmd.add_argument("--g", default=None, help="comma-separated g_k(M4), e.g. '0, 1' for S0 = rho")

    bv = commands.add_parser("bv", help="BV extension").add_subparsers(dest="action", required=True)
    bv.add_parser("extend", parents=[common, bv_params], help="build S_BV and S~")
    bv.add_parser("cme", parents=[common, bv_params], help="classical master equation for S~")
    gauge = bv.add_parser("gauge-fix", parents=[common, bv_params], help="gauge-fix S_tot")
    gauge.add_argument("--psi", default="0", help="gauge-fixing fermion over the fields of X_tot")
    brst_cmd = bv.add_parser("brst", parents=[common, bv_params], help="apply d = {S~, -}")
    brst_cmd.add_argument("expr", nargs="?", default="M1", help="expression over X~ (default M1)")

    triple = commands.add_parser("triple", help="spectral triples").add_subparsers(dest="action", required=True)
    check = triple.add_parser("check", parents=[common], help="KO axioms of a JSON triple")
    check.add_argument("file")
    check.add_argument("--ko", type=int, default=None, help="KO-dimension; mixed check when omitted")

    bvtriple = commands.add_parser("bvtriple", help="BV spectral triples").add_subparsers(dest="action", required=True)
    for name, text in [("verify", "BV fermionic action"), ("aux-verify", "auxiliary linear action"),
                       ("ko-report", "KO-dimension table"), ("lemmas", "maximal algebra checks")]:
        bvtriple.add_parser(name, parents=[common], help=text)

    suite = commands.add_parser("suite", help="seeded suites").add_subparsers(dest="action", required=True)
    suite.add_parser("all", parents=[common], help="run every suite")
    return parser


# ===================================================================
# COMMANDS
# ===================================================================

def _f_coefficients(args):
    return parse_univariate(args.f) if args.f else DEFAULT_F


def _inputs(args, *names):
    return {name: getattr(args, name) for name in names if getattr(args, name, None) is not None}


def _extended_action(args, space):
    alpha = parse_rationals(args.alpha, 3)
    beta = parse_rationals(args.beta, 1)[0]
    T = parse_expression(args.T, GAUGE_FIELDS)
    S_BV = build_S_BV(alpha, beta, T, space)
    return S_BV, build_S_tilde(spectral_action(_f_coefficients(args)), S_BV)


def run_model(args):
    if args.action == "s0":
        return [check_closed_form(_f_coefficients(args), check_id="model.s0")]
    if args.g is not None:
        action = ActionPolynomial.from_g([parse_univariate(part, "M4") for part in args.g.split(",")])
    else:
        action = ActionPolynomial.from_f(_f_coefficients(args))
    clock = Stopwatch()
    result = classify(action)
    summary = clock.lap(VerificationReport.from_residuals("model.classify", {}, _inputs(args, "f", "g"),
                                                          output=json.dumps(result.to_dict())))
    report, _ = relations(action.to_polynomial())
    return [summary, clock.lap(report)]


def run_bv(args):
    clock = Stopwatch()
    space = build_extended_space()
    S_BV, S_tilde = _extended_action(args, space)
    inputs = _inputs(args, "f", "alpha", "beta", "T")
    if args.action == "extend":
        return [clock.lap(VerificationReport.from_residuals("bv.extend", {"structure": nonconforming_terms(S_BV)},
                                                            inputs, output=S_tilde.to_text()))]
    if args.action == "cme":
        return [check_cme(S_tilde, space.registry, check_id="bv.cme", inputs=inputs)]
    if args.action == "brst":
        g = parse_expression(args.expr, space.registry.names)
        image = brst(S_tilde, g, space.registry)
        return [clock.lap(VerificationReport.from_residuals("bv.brst", {"d^2": brst(S_tilde, image, space.registry)},
                                                            {**inputs, "expr": args.expr}, output=image.to_text()))]
    total = build_total_space(space)
    psi = GaugeFixingFermion(parse_expression(args.psi, total.registry.names))
    fixed = gauge_fix(build_S_tot(S_tilde), psi, total.registry)
    residuals = {
        "no antifields": condition(not fixed.contains_kind(FieldKind.ANTIFIELD)),
        "degree 0": condition(fixed.ghost_degree == 0),
    }
    return [clock.lap(VerificationReport.from_residuals("bv.gauge_fix", residuals, {**inputs, "psi": args.psi},
                                                        output=fixed.to_text()))]


def run_triple(args):
    st = load_triple(args.file)
    if args.ko is None:
        return [check_mixed_ko(st, inputs={"file": args.file})]
    return [check_real_structure(st, args.ko, inputs={"file": args.file})]


def run_bvtriple(args):
    if args.action == "verify":
        return [verify_bv_action(), derivation_consistency_check()]
    if args.action == "aux-verify":
        return [verify_aux_action()]
    if args.action == "ko-report":
        return ko_dimension_report()
    return algebra_lemma_report()


def run_suite(args):
    return run_all_suites(_f_coefficients(args), {"seed": args.seed})


COMMANDS = {
    "model": run_model,
    "bv": run_bv,
    "triple": run_triple,
    "bvtriple": run_bvtriple,
    "suite": run_suite,
}


# ===================================================================
# ENTRY POINT
# ===================================================================

def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    logging.basicConfig(stream=sys.stderr, format="%(message)s",
                        level=logging.WARNING if args.json else logging.INFO, force=True)
    try:
        reports = COMMANDS[args.command](args)
    except (ParseError, ValueError, OSError) as exc:
        logger.error("❌ %s", exc)
        return 2

    stdout.write(reports_to_jsonl(reports))
    passed = sum(report.passed for report in reports)
    if passed == len(reports):
        logger.info("✅ %d/%d checks passed", passed, len(reports))
        return 0
    for report in reports:
        if not report.passed:
            logger.info("❌ %s: %s", report.check_id, report.residual)
    logger.info("❌ %d of %d checks failed", len(reports) - passed, len(reports))
    return 1


if __name__ == "__main__":
    sys.exit(main())
