"""Seeded verification suites over the whole engine."""

import logging
from fractions import Fraction

import numpy as np

from antibracket import antibracket, check_bracket_stability, check_cme, check_nilpotency
from bvextension import (
    GaugeFixingFermion,
    build_extended_space,
    build_S_BV,
    build_S_tilde,
    build_S_tot,
    build_total_space,
    build_trivial_pairs,
    gauge_fix,
    gauge_fixed_square_residuals,
    nonconforming_terms,
    restrict_to_gauge_fields,
)
from bvtriples import (
    AuxFieldVector,
    algebra_lemma_report,
    build_aux_triple,
    build_bv_triple,
    derivation_consistency_check,
    ko_dimension_report,
    verify_aux_action,
    verify_bv_action,
    UNIT_VECTOR,
)
from expression_parser import parse_expression
from matrixmodel import (
    GAUGE_FIELDS,
    PAULI,
    RHO,
    ActionPolynomial,
    GaugeCase,
    M4,
    PauliVector,
    cayley_unitary,
    check_invariance,
    classify,
    closed_form_action,
    random_rational_hermitian,
    relations,
    spectral_action,
)
from spectraltriple import bilinear_symmetry_check, linear_form
from superalgebra import FieldKind, GaussianRational, SuperPolynomial
from verification_report import Stopwatch, VerificationReport, condition, sort_reports

logger = logging.getLogger(__name__)

# ===================================================================
# SETTINGS
# ===================================================================

SUITE_DEFAULTS = {
    "seed": 0,
    "cme_samples": 20,
    "unitary_samples": 10,
    "bilinear_samples": 5,
    "core_samples": 200,
    "max_T_degree": 2,
    "max_T_terms": 3,
    "max_spectral_degree": 6,
}

DEFAULT_F = (0, 0, 1)


def suite_settings(overrides=None):
    """SUITE_DEFAULTS with known keys overridden, values coerced to int"""
    settings = dict(SUITE_DEFAULTS)
    for key, value in (overrides or {}).items():
        if key in settings and value is not None:
            settings[key] = int(value)
    return settings


# ===================================================================
# RANDOM DATA
# ===================================================================

def random_rational(rng, bound=5, nonzero=False):
    while True:
        value = Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))
        if value or not nonzero:
            return value


def random_gaussian(rng, bound=3):
    return GaussianRational(random_rational(rng, bound), random_rational(rng, bound))


def random_gauge_polynomial(rng, max_degree=2, max_terms=3):
    """Random real polynomial in M₁..M₄ of total degree ≤ max_degree"""
    result = SuperPolynomial.zero()
    for _ in range(int(rng.integers(1, max_terms + 1))):
        term = SuperPolynomial.constant(random_rational(rng))
        for _ in range(int(rng.integers(0, max_degree + 1))):
            term = term * SuperPolynomial.generator(GAUGE_FIELDS[int(rng.integers(0, 4))])
        result = result + term
    return result


def random_super_polynomial(rng, symbols, max_terms=3, max_factors=3):
    """Random homogeneous super-polynomial; terms off the first term's degree are dropped"""
    symbols = list(symbols)
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        term = SuperPolynomial.constant(random_gaussian(rng))
        for _ in range(int(rng.integers(0, max_factors + 1))):
            term = term * SuperPolynomial.generator(symbols[int(rng.integers(0, len(symbols)))])
        if not term.is_zero:
            terms.append(term)
    if not terms:
        return SuperPolynomial.constant(1)
    degree = terms[0].ghost_degree
    result = SuperPolynomial.zero()
    for term in terms:
        if term.ghost_degree == degree:
            result = result + term
    return result


def random_numeric_vector(rng, dim):
    return tuple(random_gaussian(rng) for _ in range(dim))


def _parity(poly):
    return poly.parity if not poly.is_zero else 0


# ===================================================================
# ALGEBRA CORE
# ===================================================================

def suite_core(rng, samples):
    """Randomized identities of the super-polynomial algebra and the antibracket"""
    registry = build_extended_space().registry
    symbols = registry.generators
    drawn = []
    for _ in range(samples):
        a = random_super_polynomial(rng, symbols)
        b = random_super_polynomial(rng, symbols)
        c = random_super_polynomial(rng, symbols)
        drawn.append((a, b, c, symbols[int(rng.integers(0, len(symbols)))]))
    inputs = {"samples": samples}
    clock = Stopwatch()
    reports = []

    supercommutative = {}
    for idx, (a, b, _, _) in enumerate(drawn):
        sign = -1 if _parity(a) and _parity(b) else 1
        supercommutative[f"sample{idx}"] = a * b - (b * a).scale(sign)
    reports.append(clock.lap(VerificationReport.from_residuals("core.supercommutativity", supercommutative, inputs)))

    leibniz = {}
    for idx, (a, b, _, x) in enumerate(drawn):
        leibniz_sign = -1 if x.is_odd and _parity(a) else 1
        leibniz[f"sample{idx}"] = (
            (a * b).left_derivative(x)
            - a.left_derivative(x) * b
            - (a * b.left_derivative(x)).scale(leibniz_sign)
        )
    reports.append(clock.lap(VerificationReport.from_residuals("core.leibniz", leibniz, inputs)))

    jacobi = {}
    for idx, (a, b, c, _) in enumerate(drawn):
        jacobi_sign = -1 if (_parity(a) + 1) * (_parity(b) + 1) % 2 else 1
        jacobi[f"sample{idx}"] = (
            antibracket(a, antibracket(b, c, registry), registry)
            - antibracket(antibracket(a, b, registry), c, registry)
            - antibracket(b, antibracket(a, c, registry), registry).scale(jacobi_sign)
        )
    reports.append(clock.lap(VerificationReport.from_residuals("core.jacobi", jacobi, inputs)))

    conjugation = {}
    for idx, (a, b, _, _) in enumerate(drawn):
        conjugation[f"involution{idx}"] = a.conjugate().conjugate() - a
        conjugation[f"multiplicative{idx}"] = (a * b).conjugate() - a.conjugate() * b.conjugate()
    reports.append(clock.lap(VerificationReport.from_residuals("core.conjugation", conjugation, inputs)))

    round_trip = {f"sample{idx}": parse_expression(a.to_text(), symbols) - a for idx, (a, _, _, _) in enumerate(drawn)}
    reports.append(clock.lap(VerificationReport.from_residuals("core.parser_round_trip", round_trip, inputs)))
    return reports


# ===================================================================
# MATRIX MODEL
# ===================================================================

def _sample_unitaries(rng, count):
    return [PAULI[0], PAULI[2]] + [cayley_unitary(random_rational_hermitian(rng)) for _ in range(count)]


def suite_model(f, rng, unitary_samples, max_spectral_degree):
    """Closed-form expansion, gauge invariance, relations and the three GCD cases"""
    clock = Stopwatch()
    closed = {}
    for degree in range(max_spectral_degree + 1):
        monomial = (0,) * degree + (1,)
        closed[f"x^{degree}"] = spectral_action(monomial) - closed_form_action(monomial)
    reports = [clock.lap(VerificationReport.from_residuals("model.closed_form", closed, {"max_degree": max_spectral_degree}))]

    S0 = spectral_action(f)
    unitaries = _sample_unitaries(rng, unitary_samples)
    reports.append(clock.lap(check_invariance(S0, unitaries, inputs={"f": [str(c) for c in f]})))

    D = PauliVector(tuple(random_rational(rng) for _ in range(4)))
    reports.append(clock.lap(check_invariance(spectral_action(f, D), unitaries, D, check_id="model.invariance_with_D",
                                             inputs={"D": [c.to_text() for c in D]})))

    report, _ = relations(S0, check_id="model.relations_f")
    reports.append(clock.lap(report))
    g_form = ActionPolynomial.from_g([(0,), (0, 1)]).to_polynomial()
    report, _ = relations(g_form, check_id="model.relations_g")
    reports.append(clock.lap(report))

    expected = [
        ("x", (0, 1), GaugeCase.CASE1, None),
        ("x^2", (0, 0, 1), GaugeCase.CASE2, None),
        ("rho*M4^2", RHO * M4 ** 2, GaugeCase.CASE3, M4),
    ]
    residuals = {}
    for label, action, case, witness in expected:
        if isinstance(action, tuple):
            action = spectral_action(action)
        result = classify(action)
        residuals[f"{label} is {case.value}"] = condition(result.case is case)
        if witness is not None:
            residuals[f"{label} witness"] = result.witness - witness
    reports.append(clock.lap(VerificationReport.from_residuals("model.classify", residuals)))
    return reports


# ===================================================================
# BV EXTENSION
# ===================================================================

def suite_cme(f, rng, samples, max_T_degree, max_T_terms):
    """Master equation for random admissible (α, β, T) and two actions"""
    space = build_extended_space()
    actions = {
        "f": spectral_action(f),
        "rho": ActionPolynomial.from_g([(0,), (1,)]).to_polynomial(),
    }
    clock = Stopwatch()
    reports = []
    for label, S0 in actions.items():
        extensions = {}
        for _ in range(samples):
            alpha = tuple(random_rational(rng, nonzero=True) for _ in range(3))
            beta = random_rational(rng, nonzero=True)
            T = random_gauge_polynomial(rng, max_T_degree, max_T_terms)
            name = f"alpha={','.join(map(str, alpha))} beta={beta} T={T.to_text()}"
            extensions[name] = build_S_BV(alpha, beta, T, space)
        residuals = {}
        for name, S_BV in extensions.items():
            S = build_S_tilde(S0, S_BV)
            residuals[name] = antibracket(S, S, space.registry)
        reports.append(clock.lap(VerificationReport.from_residuals(f"bv.cme_{label}", residuals, {"samples": samples})))
        structure = {name: nonconforming_terms(S_BV) for name, S_BV in extensions.items()}
        reports.append(clock.lap(VerificationReport.from_residuals(f"bv.structure_{label}", structure, {"samples": samples})))

    S_tilde = build_S_tilde(actions["f"], build_S_BV(space=space))
    clock = Stopwatch()
    reports.append(clock.lap(check_cme(S_tilde, space.registry, check_id="bv.cme_default")))
    reports.append(clock.lap(check_nilpotency(S_tilde, space.registry, check_id="bv.nilpotency")))
    reports.append(clock.lap(VerificationReport.from_identity("bv.restriction", restrict_to_gauge_fields(S_tilde, space),
                                                              actions["f"])))
    return reports


def suite_trivial_pairs(f):
    """Trivial pairs, total action, bracket stability and gauge fixing"""
    space = build_extended_space()
    pairs = build_trivial_pairs()
    total = build_total_space(space, pairs)
    S0 = spectral_action(f)
    S_tilde = build_S_tilde(S0, build_S_BV(space=space))
    S_tot = build_S_tot(S_tilde, pairs)
    clock = Stopwatch()
    reports = [
        clock.lap(VerificationReport.from_residuals(
            "pairs.degrees",
            {"degrees": condition(pairs.degrees() == [(-1, 0)] * 3 + [(-2, -1), (0, 1)])},
            output=str(pairs.degrees()),
        )),
        clock.lap(check_cme(S_tot, total.registry, check_id="pairs.cme_total")),
        clock.lap(check_nilpotency(S_tot, total.registry, check_id="pairs.nilpotency_total")),
        clock.lap(check_bracket_stability(S_tot, S_tilde, total.registry, space.generators, check_id="pairs.stability")),
    ]

    zero_fixed = gauge_fix(S_tot, 0, total.registry)
    psi = SuperPolynomial.zero()
    squares = SuperPolynomial.zero()
    for pair in pairs.pairs[:3]:
        h = SuperPolynomial.generator(pair.h)
        psi = psi + SuperPolynomial.generator(pair.B) * h
        squares = squares + h * h
    fermion = GaugeFixingFermion(psi)
    fixed = gauge_fix(S_tot, fermion, total.registry)
    reports.append(clock.lap(VerificationReport.from_residuals(
        "pairs.gauge_fix",
        {
            "psi=0": zero_fixed - S0,
            "psi=sum B h": fixed - (S0 + squares),
            "no antifields": condition(not fixed.contains_kind(FieldKind.ANTIFIELD)),
            "degree 0": condition(fixed.ghost_degree == 0),
        },
        output=fixed.to_text(),
    )))

    squares_report = gauge_fixed_square_residuals(S_tot, fermion, total.registry, space.registry.fields)
    nonzero = {name: value.to_text() for name, value in squares_report.items() if not value.is_zero}
    reports.append(clock.lap(VerificationReport.from_residuals(
        "pairs.gauge_fixed_d2",
        {},
        inputs={"psi": psi.to_text()},
        output=f"nonzero d^2 residuals: {nonzero or 'none'}",
    )))
    return reports


# ===================================================================
# SPECTRAL TRIPLES
# ===================================================================

def suite_bv_triple(rng, bilinear_samples):
    data = build_bv_triple()
    samples = [(random_numeric_vector(rng, data.dim), random_numeric_vector(rng, data.dim))
               for _ in range(bilinear_samples)]
    return [
        derivation_consistency_check(data),
        verify_bv_action(data),
        bilinear_symmetry_check(data.triple, data.D1, data.D2, samples, check_id="bvtriple.bilinear"),
    ]


def suite_aux_triple(rng):
    data = build_aux_triple()
    chi = AuxFieldVector.symbolic(data.registry).components
    shift = random_numeric_vector(rng, 6)
    scalar = random_gaussian(rng)
    action = verify_aux_action(data)
    clock = Stopwatch()

    def L(vector):
        return linear_form(data.triple, UNIT_VECTOR, vector)

    summed = tuple(SuperPolynomial.lift(a) + SuperPolynomial.lift(b) for a, b in zip(chi, shift))
    scaled = tuple(SuperPolynomial.lift(a).scale(scalar) for a in chi)
    linearity = clock.lap(VerificationReport.from_residuals("bvtriple.aux_linearity", {
        "additive": L(summed) - L(chi) - L(shift),
        "homogeneous": L(scaled) - L(chi).scale(scalar),
    }))
    return [action, linearity]


# ===================================================================
# ALL SUITES
# ===================================================================

def run_all_suites(f=DEFAULT_F, settings=None):
    """Every suite with one seeded generator; reports sorted by check_id"""
    settings = suite_settings(settings)
    rng = np.random.default_rng(settings["seed"])
    logger.info("running all suites with seed %d", settings["seed"])
    reports = []
    reports += suite_core(rng, settings["core_samples"])
    reports += suite_model(f, rng, settings["unitary_samples"], settings["max_spectral_degree"])
    reports += suite_cme(f, rng, settings["cme_samples"], settings["max_T_degree"], settings["max_T_terms"])
    reports += suite_trivial_pairs(f)
    reports += suite_bv_triple(rng, settings["bilinear_samples"])
    reports += suite_aux_triple(rng)
    reports += ko_dimension_report()
    reports += algebra_lemma_report()
    return sort_reports(reports)
