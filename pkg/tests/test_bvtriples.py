import pytest

from bvextension import build_S_aux, build_S_BV
from bvtriples import (
    AuxFieldVector,
    BVFieldVector,
    VectorSubspaceError,
    algebra_lemma_report,
    alpha_matrix,
    aux_linear_action,
    build_aux_triple,
    build_bv_triple,
    bv_action_split,
    bv_fermionic_action,
    bv_registry,
    default_triple_symbols,
    derivation_consistency_check,
    ko_dimension_report,
    left_multiplication,
    pauli_derivation_matrix,
    verify_aux_action,
    verify_bv_action,
)
from matrixmodel import PAULI
from spectraltriple import MatrixOverRing
from superalgebra import I

BV = build_bv_triple()
AUX = build_aux_triple()
REGISTRY = bv_registry()


class TestPauliRepresentation:
    def test_identity_derivation(self):
        assert pauli_derivation_matrix(lambda X: X) == MatrixOverRing.identity(4)
        assert left_multiplication(PAULI[3]) == MatrixOverRing.identity(4)

    def test_alpha_is_traceless(self):
        assert alpha_matrix(REGISTRY).trace().is_zero

    def test_derivations(self):
        assert derivation_consistency_check(BV).passed


class TestBVTriple:
    def test_shape(self):
        assert BV.dim == 8
        assert BV.J.square_sign() == 1
        assert BV.D.is_self_adjoint
        assert BV.D1 + BV.D2 == BV.D

    def test_fermionic_action_is_the_extended_action(self):
        assert bv_fermionic_action(data=BV) == build_S_BV()

    def test_split(self):
        part1, part2 = bv_action_split(data=BV)
        assert part1 + part2 == bv_fermionic_action(data=BV)
        assert not part2.is_zero

    def test_report(self):
        report = verify_bv_action(BV)
        assert report.passed
        assert report.check_id == "bvtriple.bv_action"

    def test_default_symbols(self):
        assert [sym.name for sym in default_triple_symbols()] == [
            "M1*", "M2*", "M3*", "C1*", "C2*", "C3*", "B1*", "B2*", "B3*", "A1*", "A2*",
        ]


class TestBVFieldVector:
    def test_components(self):
        phi = BVFieldVector.symbolic(REGISTRY)
        assert phi.components[3] == REGISTRY.poly("E").scale(I)
        assert BVFieldVector.from_components(phi.components) == phi

    def test_wrong_length(self):
        with pytest.raises(VectorSubspaceError):
            BVFieldVector((0, 0), 0, (0, 0, 0, 0))
        with pytest.raises(VectorSubspaceError):
            BVFieldVector.from_components([0] * 7)

    def test_complex_component(self):
        with pytest.raises(VectorSubspaceError):
            BVFieldVector((I, 0, 0), 0, (0, 0, 0, 0))

    def test_parity(self):
        with pytest.raises(VectorSubspaceError):
            BVFieldVector((REGISTRY.poly("C1"), 0, 0), 0, (0, 0, 0, 0))
        with pytest.raises(VectorSubspaceError):
            BVFieldVector((0, 0, 0), 0, (REGISTRY.poly("M1"), 0, 0, 0))


class TestAuxTriple:
    def test_shape(self):
        assert AUX.triple.dim == 6
        assert AUX.D.is_self_adjoint
        assert AUX.D_diag + AUX.D_off == AUX.D

    def test_linear_action(self):
        assert aux_linear_action(data=AUX) == build_S_aux()

    def test_report(self):
        assert verify_aux_action(AUX).passed

    def test_vector_validation(self):
        with pytest.raises(VectorSubspaceError):
            AuxFieldVector((0, 0, 0), (0, 0))
        with pytest.raises(VectorSubspaceError):
            AuxFieldVector((I, 0, 0, 0), (0, 0))


class TestReports:
    def test_ko_dimension(self):
        reports = ko_dimension_report(BV, AUX)
        assert len(reports) == 10
        assert all(report.passed for report in reports), [r.check_id for r in reports if not r.passed]
        assert "bvtriple.ko.bv_D1_n7.expected_fail" in [r.check_id for r in reports]
        assert "bvtriple.ko.aux_off_n7.expected_fail" in [r.check_id for r in reports]

    def test_algebra_lemmas(self):
        reports = algebra_lemma_report(BV, AUX)
        assert [r.check_id for r in reports] == [
            "bvtriple.lemma.bv_diagonal",
            "bvtriple.lemma.bv_blocks.expected_fail",
            "bvtriple.lemma.aux_scalars",
            "bvtriple.lemma.aux_c3.expected_fail",
            "bvtriple.lemma.aux_m2_c2.expected_fail",
        ]
        assert all(report.passed for report in reports)
