import pytest
from hypothesis import given, settings

from antibracket import (
    FieldRegistry,
    NotDegreeZeroError,
    RegistryError,
    UnregisteredGeneratorError,
    antibracket,
    brst,
    check_bracket_stability,
    check_cme,
    check_nilpotency,
    make_antifield,
)
from superalgebra import FieldKind, FieldSymbol, SuperPolynomial
from tests.strategies import REGISTRY, parity, super_polynomials


def poly(name):
    return REGISTRY.poly(name)


M1, M2, M1_STAR, C1, C1_STAR = (poly(name) for name in ("M1", "M2", "M1*", "C1", "C1*"))


class TestRegistry:
    def test_antifield_degree_and_parity(self):
        anti = make_antifield(FieldSymbol("E", 2, FieldKind.GHOST))
        assert anti.name == "E*"
        assert anti.ghost_degree == -3
        assert anti.kind is FieldKind.ANTIFIELD
        assert anti.is_odd

    def test_partner_lookup(self):
        m1 = REGISTRY.symbol("M1")
        assert REGISTRY.partner(m1) == REGISTRY.symbol("M1*")
        assert REGISTRY.partner(REGISTRY.symbol("M1*")) == m1

    def test_wrong_antifield_degree(self):
        fld = FieldSymbol("M1", 0)
        with pytest.raises(RegistryError):
            FieldRegistry(((fld, FieldSymbol("M1*", 0, FieldKind.ANTIFIELD)),))

    def test_paired_twice(self):
        fld = FieldSymbol("M1", 0)
        with pytest.raises(RegistryError):
            FieldRegistry(((fld, make_antifield(fld)), (fld, make_antifield(fld))))

    def test_unknown_name(self):
        with pytest.raises(UnregisteredGeneratorError):
            REGISTRY.symbol("Z9")

    def test_extended(self):
        extra = FieldSymbol("h1", 0, FieldKind.AUXILIARY)
        bigger = REGISTRY.extended([(extra, make_antifield(extra))])
        assert extra in bigger
        assert extra not in REGISTRY
        assert len(bigger.fields) == len(REGISTRY.fields) + 1


class TestAntibracket:
    def test_canonical_pairs(self):
        assert antibracket(M1, M1_STAR, REGISTRY) == 1
        assert antibracket(M1_STAR, M1, REGISTRY) == -1
        assert antibracket(C1, C1_STAR, REGISTRY) == 1
        assert antibracket(C1_STAR, C1, REGISTRY) == -1

    def test_unpaired_generators(self):
        assert antibracket(M1, M2, REGISTRY).is_zero
        assert antibracket(M1, poly("M2*"), REGISTRY).is_zero

    def test_unregistered_generator(self):
        stray = SuperPolynomial.generator(FieldSymbol("Z", 0))
        with pytest.raises(UnregisteredGeneratorError):
            antibracket(stray, M1, REGISTRY)

    @settings(max_examples=300, deadline=None)
    @given(super_polynomials(), super_polynomials())
    def test_graded_antisymmetry(self, F, G):
        sign = -1 if (parity(F) + 1) * (parity(G) + 1) % 2 else 1
        assert antibracket(F, G, REGISTRY) == -antibracket(G, F, REGISTRY).scale(sign)

    @settings(max_examples=1000, deadline=None)
    @given(super_polynomials(max_terms=2), super_polynomials(max_terms=2), super_polynomials(max_terms=2))
    def test_graded_jacobi(self, F, G, H):
        sign = -1 if (parity(F) + 1) * (parity(G) + 1) % 2 else 1
        lhs = antibracket(F, antibracket(G, H, REGISTRY), REGISTRY)
        rhs = (antibracket(antibracket(F, G, REGISTRY), H, REGISTRY)
               + antibracket(G, antibracket(F, H, REGISTRY), REGISTRY).scale(sign))
        assert lhs == rhs

    @given(super_polynomials())
    def test_bracket_is_odd(self, F):
        bracket = antibracket(F, F, REGISTRY)
        if not bracket.is_zero and not F.is_zero:
            assert bracket.ghost_degree == 2 * F.ghost_degree + 1


class TestMasterEquation:
    def test_failing_action_reports_residual(self):
        S = M1_STAR * C1 + M1
        report = check_cme(S, REGISTRY, check_id="cme.demo")
        assert not report.passed
        assert report.failed_conditions == ["{S,S}"]
        assert report.residual == "{S,S}: 2 * C1"

    def test_fails_nilpotency_on_the_ghost_antifield(self):
        S = M1_STAR * C1 + M1
        report = check_nilpotency(S, REGISTRY, generators=[REGISTRY.symbol("C1*")])
        assert not report.passed
        assert report.failed_conditions == ["d^2(C1*)"]

    def test_gauge_invariant_action(self):
        S = M1 ** 2 + M2 ** 2
        assert check_cme(S, REGISTRY).passed
        assert check_nilpotency(S, REGISTRY).passed

    def test_requires_degree_zero(self):
        with pytest.raises(NotDegreeZeroError):
            check_cme(C1, REGISTRY)

    def test_matches_the_full_bracket(self):
        S = M1_STAR * C1 + M1
        assert antibracket(S, S, REGISTRY) == C1.scale(2)

    def test_brst_of_a_field(self):
        S = M1_STAR * C1 + M1
        assert brst(S, M1, REGISTRY) == C1
        assert brst(S, C1_STAR, REGISTRY) == M1_STAR
        assert brst(S, M1_STAR, REGISTRY) == 1


class TestStability:
    def test_extra_pair_decouples(self):
        B = FieldSymbol("B1", -1, FieldKind.AUXILIARY)
        h = FieldSymbol("h1", 0, FieldKind.AUXILIARY)
        reg = REGISTRY.extended([(B, make_antifield(B)), (h, make_antifield(h))])
        S = M1 ** 2
        S_total = S + SuperPolynomial.generator(make_antifield(B)) * SuperPolynomial.generator(h)
        report = check_bracket_stability(S_total, S, reg, [REGISTRY.symbol("M1"), REGISTRY.symbol("C1")])
        assert report.passed
        assert check_cme(S_total, reg).passed
