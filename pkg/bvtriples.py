"""The BV spectral triple and the BV auxiliary spectral triple of the U(2) model."""

import logging
from dataclasses import dataclass
from fractions import Fraction

from antibracket import FieldRegistry, make_antifield
from bvextension import (
    build_extended_space,
    build_S_aux,
    build_S_BV,
    build_trivial_pairs,
    levi_civita,
)
from matrixmodel import PAULI
from spectraltriple import (
    FiniteSpectralTriple,
    MatrixOverRing,
    RealStructure,
    SpectralTripleError,
    check_mixed_ko,
    check_real_structure,
    decompose_mixed,
    fermionic_action,
    inner_product,
    linear_form,
    matrix_residual,
    verify_subalgebra_conditions,
)
from superalgebra import FieldKind, FieldSymbol, I, SuperPolynomial
from verification_report import VerificationReport, timed

logger = logging.getLogger(__name__)

# printed T is the Pauli representation of ANTICOMMUTATOR_SIGN·[α, ·]₊
ANTICOMMUTATOR_SIGN = -1

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)

GHOST_C4 = FieldSymbol("C4", 1, FieldKind.GHOST)
AUX_H4 = FieldSymbol("h4", 0, FieldKind.AUXILIARY)


class VectorSubspaceError(SpectralTripleError):
    """Vector outside the physical subspace of the Hilbert space"""


def bv_registry():
    """Registry of X̃ plus the decoupled ghost C₄"""
    return build_extended_space().registry.extended([(GHOST_C4, make_antifield(GHOST_C4))])


def aux_registry():
    """Trivial pairs of the U(2) model plus the spare h₄"""
    return FieldRegistry(build_trivial_pairs().registry_pairs + ((AUX_H4, make_antifield(AUX_H4)),))


def default_triple_symbols():
    """Antifields that parametrize D_BV and D_aux"""
    bv, aux = bv_registry(), aux_registry()
    names_bv = [f"M{i}*" for i in range(1, 4)] + [f"C{i}*" for i in range(1, 4)]
    names_aux = [f"B{i}*" for i in range(1, 4)] + ["A1*", "A2*"]
    return tuple(bv.symbol(n) for n in names_bv) + tuple(aux.symbol(n) for n in names_aux)


# ===================================================================
# PAULI REPRESENTATION OF DERIVATIONS
# ===================================================================

def pauli_combination(coefficients):
    """Σ c_a σ_a over the first len(coefficients) Pauli matrices"""
    total = MatrixOverRing.zeros(2)
    for coeff, sigma in zip(coefficients, PAULI):
        total = total + sigma * SuperPolynomial.lift(coeff)
    return total


def pauli_derivation_matrix(operation):
    """Matrix of X ↦ operation(X) on M₂(ℂ): entry (k,l) = ½ tr(σ_k · operation(σ_l))"""
    images = [operation(sigma) for sigma in PAULI]
    return MatrixOverRing.from_function(
        4, 4, lambda k, l: (PAULI[k] @ images[l]).trace().scale(HALF)
    )


def left_multiplication(a):
    return pauli_derivation_matrix(lambda X: a @ X)


def alpha_matrix(registry=None):
    """α = ½(−C₁*σ₁ − C₂*σ₂ − C₃*σ₃)"""
    registry = registry or bv_registry()
    return pauli_combination([registry.poly(f"C{a}*").scale(-HALF) for a in range(1, 4)])


def beta_matrix(registry=None):
    """β = ½(−M₁*σ₁ − M₂*σ₂ − M₃*σ₃)"""
    registry = registry or bv_registry()
    return pauli_combination([registry.poly(f"M{a}*").scale(-HALF) for a in range(1, 4)])


def _epsilon_block(polys):
    """4×4 block with entry (k,l) = i ε_klm p_m for k,l ≤ 3, fourth row and column zero"""
    def entry(k, l):
        if k == 3 or l == 3:
            return 0
        total = SuperPolynomial.zero()
        for m in range(3):
            eps = levi_civita(k + 1, l + 1, m + 1)
            if eps:
                total = total + polys[m].scale(eps * I)
        return total
    return MatrixOverRing.from_function(4, 4, entry)


def _t_block(polys):
    def entry(k, l):
        if l == 3 and k < 3:
            return polys[k]
        if k == 3 and l < 3:
            return polys[l]
        return 0
    return MatrixOverRing.from_function(4, 4, entry)


# ===================================================================
# BV SPECTRAL TRIPLE
# ===================================================================

@dataclass(frozen=True)
class BVTripleData:
    registry: FieldRegistry
    R: MatrixOverRing
    S: MatrixOverRing
    T: MatrixOverRing
    D1: MatrixOverRing
    D2: MatrixOverRing
    triple: FiniteSpectralTriple

    @property
    def D(self):
        return self.triple.D

    @property
    def J(self):
        return self.triple.J

    @property
    def dim(self):
        return self.triple.dim


def bv_algebra():
    """M₂(ℂ) acting diagonally by left multiplication on M₂(ℂ) ⊕ M₂(ℂ)"""
    return tuple(left_multiplication(sigma).direct_sum(left_multiplication(sigma)) for sigma in PAULI)


def build_bv_triple():
    """(A_BV, H_BV, D_BV, J_BV) with D_BV = (T R; R* S)"""
    registry = bv_registry()
    m_star = [registry.poly(f"M{a}*") for a in range(1, 4)]
    c_star = [registry.poly(f"C{a}*") for a in range(1, 4)]
    R = _epsilon_block(m_star)
    S = _epsilon_block(c_star)
    T = _t_block(c_star)
    zero = MatrixOverRing.zeros(4)
    D = MatrixOverRing.block([[T, R], [R.adjoint(), S]])
    D1 = MatrixOverRing.block([[zero, R], [R.adjoint(), S]])
    D2 = MatrixOverRing.block([[T, zero], [zero, zero]])
    J = RealStructure.scalar(8, I)
    triple = FiniteSpectralTriple(bv_algebra(), D, J, name="BV")
    logger.debug("built BV triple on a space of dimension %d", triple.dim)
    return BVTripleData(registry, R, S, T, D1, D2, triple)


@timed
def derivation_consistency_check(data=None, check_id="bvtriple.derivations"):
    """R, S, T against the Pauli representations of [β,·], [α,·] and [α,·]₊"""
    data = data or build_bv_triple()
    alpha, beta = alpha_matrix(data.registry), beta_matrix(data.registry)
    residuals = {}
    matrix_residual(residuals, "R-[beta,.]", data.R - pauli_derivation_matrix(beta.commutator))
    matrix_residual(residuals, "S-[alpha,.]", data.S - pauli_derivation_matrix(alpha.commutator))
    anticommutator = pauli_derivation_matrix(alpha.anticommutator).scale(ANTICOMMUTATOR_SIGN)
    matrix_residual(residuals, "T-sign*[alpha,.]+", data.T - anticommutator)
    return VerificationReport.from_residuals(check_id, residuals, {"anticommutator_sign": ANTICOMMUTATOR_SIGN})


@dataclass(frozen=True)
class BVFieldVector:
    """φ = (M₁, M₂, M₃, iE, C₁, C₂, C₃, C₄) in H_{BV,f}"""
    M: tuple
    E: SuperPolynomial
    C: tuple

    def __post_init__(self):
        M = tuple(SuperPolynomial.lift(x) for x in self.M)
        C = tuple(SuperPolynomial.lift(x) for x in self.C)
        E = SuperPolynomial.lift(self.E)
        if len(M) != 3 or len(C) != 4:
            raise VectorSubspaceError("a BV field vector has three M components and four C components")
        for label, value in [*zip(("M1", "M2", "M3"), M), ("E", E), *zip(("C1", "C2", "C3", "C4"), C)]:
            if not value.is_real:
                raise VectorSubspaceError(f"component {label} = {value.to_text()} is not real")
        if any(not x.is_zero and x.parity for x in (*M, E)):
            raise VectorSubspaceError("M and E components must be even")
        if any(not x.is_zero and not x.parity for x in C):
            raise VectorSubspaceError("C components must be odd")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "E", E)

    @classmethod
    def symbolic(cls, registry=None):
        registry = registry or bv_registry()
        return cls(
            tuple(registry.poly(f"M{a}") for a in range(1, 4)),
            registry.poly("E"),
            tuple(registry.poly(f"C{a}") for a in range(1, 5)),
        )

    @classmethod
    def from_components(cls, components):
        components = [SuperPolynomial.lift(x) for x in components]
        if len(components) != 8:
            raise VectorSubspaceError("H_BV has dimension 8")
        return cls(components[:3], components[3].scale(-I), components[4:])

    @property
    def components(self):
        return (*self.M, self.E.scale(I), *self.C)


def bv_fermionic_action(phi=None, data=None):
    """½⟨J_BV φ, D_BV φ⟩"""
    data = data or build_bv_triple()
    phi = phi or BVFieldVector.symbolic(data.registry)
    return fermionic_action(data.triple, phi.components)


def bv_action_split(phi=None, data=None):
    """Contributions (½⟨Jφ, D₁φ⟩, ½⟨Jφ, D₂φ⟩)"""
    data = data or build_bv_triple()
    phi = phi or BVFieldVector.symbolic(data.registry)
    return (
        fermionic_action(data.triple, phi.components, data.D1),
        fermionic_action(data.triple, phi.components, data.D2),
    )


@timed
def verify_bv_action(data=None, check_id="bvtriple.bv_action"):
    """Fermionic action of the BV triple against S_BV at α = β = 1, T = 0"""
    data = data or build_bv_triple()
    action = bv_fermionic_action(data=data)
    expected = build_S_BV()
    ghost_free = expected.set_to_zero([data.registry.symbol("E")])
    part1, part2 = bv_action_split(data=data)
    residuals = {
        "S_ferm-S_BV": action - expected,
        "C4 coefficient": action.left_derivative(GHOST_C4),
        "D1 part": part1 - ghost_free,
        "D2 part": part2 - (expected - ghost_free),
    }
    return VerificationReport.from_residuals(check_id, residuals, output=action.to_text())


# ===================================================================
# AUXILIARY SPECTRAL TRIPLE
# ===================================================================

@dataclass(frozen=True)
class AuxTripleData:
    registry: FieldRegistry
    P: MatrixOverRing
    Q: MatrixOverRing
    D_diag: MatrixOverRing
    D_off: MatrixOverRing
    triple: FiniteSpectralTriple

    @property
    def D(self):
        return self.triple.D

    @property
    def J(self):
        return self.triple.J


# sign pattern of the off-diagonal column of P, one row per Pauli index
_P_SIGNS = ((1, -1, -1), (-1, 1, -1), (-1, -1, 1))


def _p_block(b_star):
    trace_part = (b_star[0] + b_star[1] + b_star[2]).scale(HALF)

    def entry(k, l):
        if k == l:
            return trace_part
        if l == 3 and k < 3:
            k, l = l, k
        if k == 3 and l < 3:
            total = SuperPolynomial.zero()
            for sign, b in zip(_P_SIGNS[l], b_star):
                total = total + b.scale(sign)
            return total.scale(HALF)
        return 0
    return MatrixOverRing.from_function(4, 4, entry)


def _q_block(a_star):
    return MatrixOverRing.from_function(
        2, 4, lambda l, j: a_star[l].scale(-THIRD * I) if j < 3 else 0
    )


def build_aux_triple():
    """(A_aux, H_aux, D_aux, J_aux) with D_aux = D_diag + D_off"""
    registry = aux_registry()
    b_star = [registry.poly(f"B{j}*") for j in range(1, 4)]
    a_star = [registry.poly(f"A{l}*") for l in range(1, 3)]
    P = _p_block(b_star)
    Q = _q_block(a_star)
    D_diag = MatrixOverRing.block([[P, MatrixOverRing.zeros(4, 2)], [MatrixOverRing.zeros(2, 4), MatrixOverRing.zeros(2)]])
    D_off = MatrixOverRing.block([[MatrixOverRing.zeros(4), Q.adjoint()], [Q, MatrixOverRing.zeros(2)]])
    J = RealStructure.scalar(6, I)
    triple = FiniteSpectralTriple((MatrixOverRing.identity(6),), D_diag + D_off, J, name="aux")
    return AuxTripleData(registry, P, Q, D_diag, D_off, triple)


@dataclass(frozen=True)
class AuxFieldVector:
    """χ = (ih₁, ih₂, ih₃, ih₄, k₁, k₂) in H_{aux,f}"""
    h: tuple
    k: tuple

    def __post_init__(self):
        h = tuple(SuperPolynomial.lift(x) for x in self.h)
        k = tuple(SuperPolynomial.lift(x) for x in self.k)
        if len(h) != 4 or len(k) != 2:
            raise VectorSubspaceError("an auxiliary vector has four h components and two k components")
        if not all(x.is_real for x in h + k):
            raise VectorSubspaceError("h and k components must be real")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "k", k)

    @classmethod
    def symbolic(cls, registry=None):
        registry = registry or aux_registry()
        return cls(
            tuple(registry.poly(f"h{j}") for j in range(1, 5)),
            tuple(registry.poly(f"k{l}") for l in range(1, 3)),
        )

    @property
    def components(self):
        return (*(x.scale(I) for x in self.h), *self.k)


UNIT_VECTOR = (1,) * 6


def aux_linear_action(chi=None, data=None):
    """L_{D_aux}(χ) with v = (1, …, 1)"""
    data = data or build_aux_triple()
    chi = chi or AuxFieldVector.symbolic(data.registry)
    return linear_form(data.triple, UNIT_VECTOR, chi.components)


def aux_action_summands(chi=None, data=None):
    """(⟨J 1̄, Dχ⟩, ⟨Jχ, D 1̄⟩) before halving"""
    data = data or build_aux_triple()
    chi = chi or AuxFieldVector.symbolic(data.registry)
    J, D = data.J, data.D
    first = inner_product(J.apply(UNIT_VECTOR), D.apply(chi.components))
    second = inner_product(J.apply(chi.components), D.apply(UNIT_VECTOR))
    return first, second


def _aux_cross_terms(registry):
    """Σ_{j≤3, l} A_l* h_j"""
    total = SuperPolynomial.zero()
    for l in range(1, 3):
        for j in range(1, 4):
            total = total + registry.poly(f"A{l}*") * registry.poly(f"h{j}")
    return total


@timed
def verify_aux_action(data=None, check_id="bvtriple.aux_action"):
    """Linear-form action of the auxiliary triple against S_aux"""
    data = data or build_aux_triple()
    registry = data.registry
    s_aux = build_S_aux(build_trivial_pairs())
    action = aux_linear_action(data=data)
    first, second = aux_action_summands(data=data)
    b_part = SuperPolynomial.zero()
    k_part = SuperPolynomial.zero()
    for j in range(1, 4):
        b_part = b_part + registry.poly(f"B{j}*") * registry.poly(f"h{j}")
    for l in range(1, 3):
        k_part = k_part + registry.poly(f"A{l}*") * registry.poly(f"k{l}")
    cross = _aux_cross_terms(registry).scale(THIRD * I)
    residuals = {
        "L(chi)-S_aux": action - s_aux,
        "first summand": first - (b_part + k_part - cross),
        # −k_l A_l* = A_l* k_l for odd k and A*
        "second summand": second - (b_part + k_part + cross),
        "cross terms cancel": (first - b_part - k_part) + (second - b_part - k_part),
    }
    return VerificationReport.from_residuals(check_id, residuals, output=action.to_text())


# ===================================================================
# REPORTS
# ===================================================================

def _ko(triple, D, n, check_id, expect_fail=False):
    report = check_real_structure(triple.with_operator(D), n, check_id=check_id)
    return report.expect_failure() if expect_fail else report


@timed
def _decomposition_report(check_id, D, J, D1, D2):
    got1, got2 = decompose_mixed(D, J)
    residuals = {}
    matrix_residual(residuals, "D1", got1 - D1)
    matrix_residual(residuals, "D2", got2 - D2)
    return VerificationReport.from_residuals(check_id, residuals)


def ko_dimension_report(bv=None, aux=None):
    """KO-dimension of each summand and the mixed-KO definition for both triples"""
    bv = bv or build_bv_triple()
    aux = aux or build_aux_triple()
    return [
        _ko(bv.triple, bv.D1, 1, "bvtriple.ko.bv_D1_n1"),
        _ko(bv.triple, bv.D1, 7, "bvtriple.ko.bv_D1_n7", expect_fail=True),
        _ko(bv.triple, bv.D2, 7, "bvtriple.ko.bv_D2_n7"),
        check_mixed_ko(bv.triple, check_id="bvtriple.ko.bv_mixed"),
        _decomposition_report("bvtriple.ko.bv_decomposition", bv.D, bv.J, bv.D1, bv.D2),
        _ko(aux.triple, aux.D_diag, 7, "bvtriple.ko.aux_diag_n7"),
        _ko(aux.triple, aux.D_off, 1, "bvtriple.ko.aux_off_n1"),
        _ko(aux.triple, aux.D_off, 7, "bvtriple.ko.aux_off_n7", expect_fail=True),
        check_mixed_ko(aux.triple, check_id="bvtriple.ko.aux_mixed"),
        _decomposition_report("bvtriple.ko.aux_decomposition", aux.D, aux.J, aux.D_off, aux.D_diag),
    ]


def bv_independent_blocks():
    """M₂(ℂ) ⊕ M₂(ℂ) acting blockwise with independent entries"""
    zero = MatrixOverRing.zeros(4)
    generators = []
    for sigma in PAULI:
        generators.append(left_multiplication(sigma).direct_sum(zero))
        generators.append(zero.direct_sum(left_multiplication(sigma)))
    return generators


def aux_block_projections():
    """ℂ ⊕ ℂ ⊕ ℂ on M₂(ℂ) ⊕ ℂ ⊕ ℂ"""
    return [
        MatrixOverRing.diagonal([1, 1, 1, 1, 0, 0]),
        MatrixOverRing.diagonal([0, 0, 0, 0, 1, 0]),
        MatrixOverRing.diagonal([0, 0, 0, 0, 0, 1]),
    ]


def aux_matrix_blocks():
    """M₂(ℂ) ⊕ ℂ ⊕ ℂ acting by left multiplication on the first summand"""
    generators = [left_multiplication(sigma).direct_sum(MatrixOverRing.zeros(2)) for sigma in PAULI]
    return generators + aux_block_projections()[1:]


def algebra_lemma_report(bv=None, aux=None):
    """Stated algebras pass; each larger candidate fails the order conditions"""
    bv = bv or build_bv_triple()
    aux = aux or build_aux_triple()
    return [
        verify_subalgebra_conditions(bv.D, bv.J, bv.triple.algebra, check_id="bvtriple.lemma.bv_diagonal"),
        verify_subalgebra_conditions(bv.D, bv.J, bv_independent_blocks(),
                                     check_id="bvtriple.lemma.bv_blocks").expect_failure(),
        verify_subalgebra_conditions(aux.D, aux.J, aux.triple.algebra, check_id="bvtriple.lemma.aux_scalars"),
        verify_subalgebra_conditions(aux.D, aux.J, aux_block_projections(),
                                     check_id="bvtriple.lemma.aux_c3").expect_failure(),
        verify_subalgebra_conditions(aux.D, aux.J, aux_matrix_blocks(),
                                     check_id="bvtriple.lemma.aux_m2_c2").expect_failure(),
    ]
