from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matrixmodel import (
    GAUGE_FIELDS,
    M1,
    M2,
    M3,
    M4,
    PAULI,
    RHO,
    ActionFormError,
    ActionPolynomial,
    GaugeCase,
    NonRealActionError,
    NonUnitaryError,
    PauliVector,
    ZeroActionError,
    cayley_unitary,
    check_closed_form,
    check_invariance,
    classify,
    closed_form_action,
    eigen_invariants,
    gauge_transform,
    random_rational_hermitian,
    relations,
    spectral_action,
    to_g_form,
)
from spectraltriple import MatrixOverRing
from superalgebra import I, SuperPolynomial
from tests.strategies import rationals


class TestPauliVector:
    def test_round_trip(self):
        vector = PauliVector.symbolic()
        assert PauliVector.from_matrix(vector.to_matrix()) == vector

    def test_hermitian(self):
        assert PauliVector((1, 2, 3, 4)).is_hermitian
        assert not PauliVector((I, 0, 0, 0)).is_hermitian

    def test_needs_four_coordinates(self):
        with pytest.raises(ValueError):
            PauliVector((1, 2, 3))


class TestSpectralAction:
    def test_quadratic(self):
        assert spectral_action((0, 0, 1)) == RHO.scale(2) + (M4 ** 2).scale(2)

    def test_linear_and_constant(self):
        assert spectral_action((0, 1)) == M4.scale(2)
        assert spectral_action((5,)) == 10

    def test_with_dirac_operator(self):
        D = PauliVector((0, 0, 0, 3))
        shifted = M4 + 3
        assert spectral_action((0, 0, 1), D) == RHO.scale(2) + (shifted ** 2).scale(2)

    def test_rejects_complex_coefficients(self):
        with pytest.raises(NonRealActionError):
            spectral_action((0, I))

    @settings(max_examples=25, deadline=None)
    @given(st.lists(rationals(), min_size=1, max_size=7))
    def test_closed_form(self, f):
        assert spectral_action(f) == closed_form_action(f)

    def test_closed_form_report(self):
        report = check_closed_form((1, 0, 1, 0, 1))
        assert report.passed
        assert report.check_id == "model.closed_form"

    def test_eigen_invariants(self):
        a1, a2 = eigen_invariants()
        # tr M = λ₁ + λ₂ and tr M² = (λ₁ + λ₂)² − 2λ₁λ₂
        assert spectral_action((0, 1)) == a1
        assert spectral_action((0, 0, 1)) == a1 ** 2 - a2.scale(2)


class TestGaugeSymmetry:
    def test_sigma1_conjugation(self):
        image = gauge_transform(PAULI[0])
        assert image == PauliVector((M1, -M2, -M3, M4))

    def test_identity_is_trivial(self):
        assert gauge_transform(PAULI[3]) == PauliVector.symbolic()

    def test_non_unitary(self):
        with pytest.raises(NonUnitaryError):
            gauge_transform(MatrixOverRing([[2, 0], [0, 1]]))

    def test_cayley_is_unitary(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            u = cayley_unitary(random_rational_hermitian(rng))
            assert u @ u.adjoint() == MatrixOverRing.identity(2)

    def test_invariance(self):
        rng = np.random.default_rng(3)
        samples = [PAULI[0], PAULI[2]] + [cayley_unitary(random_rational_hermitian(rng)) for _ in range(3)]
        S0 = spectral_action((1, 2, 0, 1))
        assert check_invariance(S0, samples).passed

    def test_invariance_with_dirac_operator(self):
        rng = np.random.default_rng(5)
        samples = [cayley_unitary(random_rational_hermitian(rng)) for _ in range(3)]
        D = PauliVector((1, Fraction(1, 2), 0, 2))
        assert check_invariance(spectral_action((0, 0, 1, 1), D), samples, D).passed

    def test_non_invariant_action_fails(self):
        report = check_invariance(M1, [PAULI[2]])
        assert not report.passed
        assert report.failed_conditions == ["u0"]


class TestRelations:
    def test_relations_of_an_invariant_action(self):
        report, vectors = relations(spectral_action((0, 0, 1, 0, 1)))
        assert report.passed
        assert vectors["R12"] == (-M2, M1, SuperPolynomial.zero(), SuperPolynomial.zero())

    def test_relations_fail_for_a_non_invariant_action(self):
        report, _ = relations(M1 * M4)
        assert not report.passed


class TestGForm:
    def test_from_spectral_action(self):
        action = to_g_form(spectral_action((0, 0, 1)))
        assert action.g == ((0, 0, 2), (2,))

    def test_round_trip(self):
        action = ActionPolynomial.from_g([(1, 2), (0, 0, 3)])
        assert to_g_form(action.to_polynomial()).g == action.g

    def test_trailing_zeros_trimmed(self):
        assert ActionPolynomial.from_g([(1, 0), (0,)]).g == ((1,),)

    @pytest.mark.parametrize("poly", [M1, M1 ** 2, M1 * M2, M3 * M4])
    def test_non_invariant(self, poly):
        with pytest.raises(ActionFormError):
            to_g_form(poly)

    def test_exactly_one_form(self):
        with pytest.raises(ValueError):
            ActionPolynomial(f=(1,), g=((1,),))


class TestClassify:
    def test_case1(self):
        result = classify(ActionPolynomial.from_f((0, 1)))
        assert result.case is GaugeCase.CASE1
        assert result.witness is None

    def test_case2(self):
        result = classify(spectral_action((0, 0, 1)))
        assert result.case is GaugeCase.CASE2
        assert result.witness == 1

    def test_case3(self):
        result = classify(RHO * M4 ** 2)
        assert result.case is GaugeCase.CASE3
        assert result.witness == M4

    def test_case3_witness_is_monic(self):
        result = classify((RHO * (M4 - 1) ** 2).scale(3))
        assert result.case is GaugeCase.CASE3
        assert result.witness == M4 - 1

    def test_pure_rho(self):
        assert classify(RHO).case is GaugeCase.CASE2

    def test_zero_action(self):
        with pytest.raises(ZeroActionError):
            classify(ActionPolynomial.from_f((0,)))

    def test_to_dict(self):
        data = classify(RHO * M4 ** 2).to_dict()
        assert data == {"case": "Case3", "witness": "M4", "g": [["0"], ["0", "0", "1"]]}

    def test_generators_are_the_gauge_fields(self):
        assert [sym.name for sym in GAUGE_FIELDS] == ["M1", "M2", "M3", "M4"]
