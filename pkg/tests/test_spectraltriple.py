import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

from spectraltriple import (
    KO_TABLE,
    FiniteSpectralTriple,
    GradingError,
    MatrixOverRing,
    NotSelfAdjointError,
    RealStructure,
    RealStructureError,
    SingularMatrixError,
    TripleFormatError,
    bilinear_symmetry_check,
    check_mixed_ko,
    check_real_structure,
    decompose_mixed,
    fermionic_action,
    inner_product,
    ko_signature,
    linear_form,
    load_triple,
    triple_from_dict,
    triple_to_dict,
)
from superalgebra import I, GaussianRational, SuperPolynomial
from tests.strategies import hermitian_rows, numeric_vectors

SWAP = MatrixOverRing([[0, 1], [1, 0]])
IDENTITY = MatrixOverRing.identity(2)
J_PLAIN = RealStructure(IDENTITY)


def triple(D=SWAP, J=J_PLAIN, algebra=(IDENTITY,), gamma=None):
    return FiniteSpectralTriple(algebra, D, J, gamma, "demo")


class TestMatrices:
    def test_inverse(self):
        m = MatrixOverRing([[1, 2], [3, 4]])
        assert m @ m.inverse() == IDENTITY
        assert m.inverse()[1, 0] == Fraction(3, 2)

    def test_complex_inverse(self):
        m = MatrixOverRing([[I, 1], [0, 2]])
        assert m.inverse() @ m == IDENTITY

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            MatrixOverRing([[1, 2], [2, 4]]).inverse()

    def test_adjoint(self):
        m = MatrixOverRing([[1, I], [2, 3]])
        assert m.adjoint() == MatrixOverRing([[1, 2], [-I, 3]])

    def test_inner_product_is_antilinear_in_the_first_slot(self):
        assert inner_product((I, 0), (1, 0)) == -I
        assert inner_product((1, 0), (I, 0)) == I

    def test_direct_sum(self):
        assert SWAP.direct_sum(IDENTITY).shape == (4, 4)
        assert SWAP.direct_sum(IDENTITY)[2, 2] == 1


class TestRealStructure:
    def test_epsilon(self):
        assert J_PLAIN.square_sign() == 1
        assert RealStructure(MatrixOverRing([[0, 1], [-1, 0]])).square_sign() == -1

    def test_imaginary_unit_squares_to_one(self):
        # J(v) = i·conj(v) gives J² = i·conj(i) = 1
        assert RealStructure.scalar(2, I).square_sign() == 1

    def test_not_an_isometry(self):
        with pytest.raises(RealStructureError):
            RealStructure(IDENTITY.scale(2))

    def test_ko_table(self):
        assert ko_signature(6).epsilon_double_prime == -1
        assert ko_signature(9) == ko_signature(1)
        assert ko_signature(3).epsilon_double_prime is None


class TestKODimension:
    @pytest.mark.parametrize("n", [0, 7])
    def test_real_symmetric_operator(self, n):
        report = check_real_structure(triple(), n)
        assert report.passed
        assert report.check_id == f"triple.ko{n}"

    def test_wrong_epsilon_prime(self):
        report = check_real_structure(triple(), 1)
        assert report.failed_conditions == ["JD=epsilon'DJ[0,1]"]

    def test_wrong_epsilon(self):
        report = check_real_structure(triple(), 2)
        assert "J^2=epsilon" in report.failed_conditions

    def test_first_order_violation(self):
        projector = MatrixOverRing.diagonal([1, 0])
        report = check_real_structure(triple(algebra=(projector,)), 0)
        assert report.failed_conditions == ["first_order(a0,b0)[0,1]"]

    def test_grading_in_odd_dimension(self):
        gamma = MatrixOverRing.diagonal([1, -1])
        report = check_real_structure(triple(gamma=gamma), 7)
        assert "grading in odd KO-dimension" in report.failed_conditions

    def test_needs_real_structure(self):
        with pytest.raises(RealStructureError):
            check_real_structure(triple(J=None), 0)

    def test_not_self_adjoint(self):
        with pytest.raises(NotSelfAdjointError):
            triple(D=MatrixOverRing([[0, 1], [0, 0]]))

    def test_grading_must_be_self_adjoint(self):
        with pytest.raises(GradingError):
            triple(gamma=MatrixOverRing([[0, 1], [0, 0]]))

    def test_grading_must_square_to_one(self):
        with pytest.raises(GradingError, match="square"):
            triple(gamma=MatrixOverRing.diagonal([1, 2]))

    def test_grading_of_wrong_shape(self):
        with pytest.raises(GradingError):
            triple(gamma=MatrixOverRing.identity(3))

    def test_valid_grading_is_accepted(self):
        assert triple(gamma=MatrixOverRing.diagonal([1, -1])).gamma == MatrixOverRing.diagonal([1, -1])


class TestMixedKODimension:
    def test_decomposition(self):
        D = MatrixOverRing([[1, I], [-I, 2]])
        D1, D2 = decompose_mixed(D, J_PLAIN)
        assert D1 == MatrixOverRing([[0, I], [-I, 0]])
        assert D2 == MatrixOverRing.diagonal([1, 2])

    def test_purely_imaginary_operator(self):
        report = check_mixed_ko(triple(D=MatrixOverRing([[0, I], [-I, 0]])))
        assert report.passed
        assert report.check_id == "triple.mixed"

    def test_genuinely_mixed_even_case_is_rejected(self):
        D = MatrixOverRing([[1, I], [-I, 2]])
        report = check_mixed_ko(triple(D=D, gamma=MatrixOverRing.diagonal([1, -1])))
        assert "genuinely mixed even case" in report.failed_conditions

    def test_bilinear_symmetry(self):
        D = MatrixOverRing([[1, I], [-I, 2]])
        st = triple(D=D)
        D1, D2 = decompose_mixed(D, J_PLAIN)
        samples = [((1, I), (2, 3)), ((Fraction(1, 2), 0), (I, 1))]
        assert bilinear_symmetry_check(st, D1, D2, samples).passed


class TestForms:
    def test_fermionic_action(self):
        assert fermionic_action(triple(), (1, 2)) == 2

    def test_linear_form(self):
        assert linear_form(triple(), (1, 0), (0, 1)) == 1


class TestJSONFormat:
    DATA = {
        "dim": 2,
        "symbols": [{"name": "x", "degree": 0, "kind": "gauge"}],
        "D": [["x", "1"], ["1", "x"]],
        "J": {"U": [["1", "0"], ["0", "1"]], "epsilon": 1},
        "algebra": [["1", "0", "0", "1"]],
    }

    def test_from_dict(self):
        st = triple_from_dict(self.DATA, name="sym")
        assert st.dim == 2
        assert st.name == "sym"
        assert len(st.algebra) == 1
        assert check_real_structure(st, 0).passed

    def test_to_dict(self):
        data = triple_to_dict(triple())
        assert data["J"]["epsilon"] == 1
        assert data["D"] == [["0", "1"], ["1", "0"]]

    def test_load(self, tmp_path):
        path = tmp_path / "finite.json"
        path.write_text(json.dumps(self.DATA), encoding="utf-8")
        st = load_triple(path)
        assert st.name == "finite"

    def test_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(TripleFormatError):
            load_triple(path)

    def test_missing_key(self):
        data = {key: value for key, value in self.DATA.items() if key != "D"}
        with pytest.raises(TripleFormatError):
            triple_from_dict(data)

    def test_epsilon_mismatch(self):
        data = dict(self.DATA, J={"U": [["1", "0"], ["0", "1"]], "epsilon": -1})
        with pytest.raises(TripleFormatError):
            triple_from_dict(data)

    def test_wrong_shape(self):
        with pytest.raises(TripleFormatError):
            triple_from_dict(dict(self.DATA, D=[["1", "0"]]))


SYMPLECTIC_U = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
J_SYMPLECTIC = RealStructure(MatrixOverRing(SYMPLECTIC_U))


def quaternionic(rows):
    return FiniteSpectralTriple((MatrixOverRing.identity(4),), MatrixOverRing(rows), J_SYMPLECTIC, None, "quaternionic")


def _sum(values):
    return sum(values, GaussianRational(0))


class TestQuaternionicStructure:
    def test_squares_to_minus_one(self):
        assert J_SYMPLECTIC.square_sign() == -1

    @settings(max_examples=25, deadline=None)
    @given(hermitian_rows())
    def test_decomposition(self, rows):
        D = MatrixOverRing(rows)
        D1, D2 = decompose_mixed(D, J_SYMPLECTIC)
        assert D1 + D2 == D
        assert J_SYMPLECTIC.conjugate_operator(D1) == -D1
        assert J_SYMPLECTIC.conjugate_operator(D2) == D2
        assert D1.is_self_adjoint and D2.is_self_adjoint

    @settings(max_examples=25, deadline=None)
    @given(hermitian_rows())
    def test_mixed_ko_holds_without_grading(self, rows):
        assert check_mixed_ko(quaternionic(rows)).passed

    @settings(max_examples=25, deadline=None)
    @given(hermitian_rows(), numeric_vectors())
    def test_fermionic_action_matches_componentwise_sum(self, rows, phi):
        J_phi = [_sum(SYMPLECTIC_U[k][l] * phi[l].conjugate() for l in range(4)) for k in range(4)]
        D_phi = [_sum(rows[k][l] * phi[l] for l in range(4)) for k in range(4)]
        expected = _sum(J_phi[k].conjugate() * D_phi[k] for k in range(4)) / 2
        assert fermionic_action(quaternionic(rows), phi) == SuperPolynomial.constant(expected)

    @settings(max_examples=25, deadline=None)
    @given(hermitian_rows(), numeric_vectors(), numeric_vectors())
    def test_bilinear_symmetry_flips_with_epsilon(self, rows, phi, psi):
        st = quaternionic(rows)
        D1, D2 = decompose_mixed(st.D, J_SYMPLECTIC)
        report = bilinear_symmetry_check(st, D1, D2, [(phi, psi)])
        assert report.passed
        assert report.inputs["epsilon"] == -1


class TestKOTable:
    def test_double_prime_only_in_even_dimension(self):
        for n, signature in KO_TABLE.items():
            assert signature.n == n
            assert signature.is_even == (n % 2 == 0)
            assert (signature.epsilon_double_prime is None) == (not signature.is_even)
            assert {signature.epsilon, signature.epsilon_prime} <= {1, -1}

    @given(integers(min_value=-40, max_value=40))
    def test_periodic_mod_eight(self, n):
        assert ko_signature(n) == ko_signature(n + 8)

    def test_plain_conjugation_with_commuting_operator(self):
        passing = {n for n in range(8) if check_real_structure(triple(), n).passed}
        assert passing == {0, 6, 7}

    def test_symplectic_conjugation_with_commuting_operator(self):
        st = FiniteSpectralTriple((MatrixOverRing.identity(4),), MatrixOverRing.identity(4), J_SYMPLECTIC)
        passing = {n for n in range(8) if check_real_structure(st, n).passed}
        assert passing == {2, 3, 4}
