"""The U(2) matrix model: Pauli coordinates, spectral action, gauge symmetry and GCD cases."""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb

import sympy

from spectraltriple import MatrixOverRing, SingularMatrixError
from superalgebra import (
    FieldSymbol,
    GaussianRational,
    I,
    SuperAlgebraError,
    SuperPolynomial,
)
from verification_report import VerificationReport, timed

logger = logging.getLogger(__name__)

# ===================================================================
# BASIS
# ===================================================================

PAULI = (
    MatrixOverRing([[0, 1], [1, 0]]),
    MatrixOverRing([[0, -I], [I, 0]]),
    MatrixOverRing([[1, 0], [0, -1]]),
    MatrixOverRing([[1, 0], [0, 1]]),
)

GAUGE_FIELDS = tuple(FieldSymbol(f"M{a}", 0) for a in range(1, 5))
M1, M2, M3, M4 = (SuperPolynomial.generator(sym) for sym in GAUGE_FIELDS)
RHO = M1 ** 2 + M2 ** 2 + M3 ** 2


class MatrixModelError(SuperAlgebraError):
    """Base error for the matrix model"""


class NonRealActionError(MatrixModelError):
    """Polynomial f has a non-real coefficient"""


class NonUnitaryError(MatrixModelError):
    """Gauge transformation is not unitary"""


class ActionFormError(MatrixModelError):
    """Action cannot be written as Σ ρ^k g_k(M4)"""


class ZeroActionError(MatrixModelError):
    """Classification of the zero action"""


@dataclass(frozen=True)
class PauliVector:
    """Coordinates (m₁..m₄) of Σ m_a σ_a"""
    m: tuple

    def __post_init__(self):
        coords = tuple(SuperPolynomial.lift(value) for value in self.m)
        if len(coords) != 4:
            raise MatrixModelError("a Pauli vector has four coordinates")
        object.__setattr__(self, "m", coords)

    @classmethod
    def symbolic(cls):
        return cls(tuple(SuperPolynomial.generator(sym) for sym in GAUGE_FIELDS))

    @classmethod
    def zero(cls):
        return cls((0, 0, 0, 0))

    @classmethod
    def from_matrix(cls, X):
        """m_a = ½ tr(σ_a X)"""
        return cls(tuple((sigma @ X).trace().scale(Fraction(1, 2)) for sigma in PAULI))

    def to_matrix(self):
        total = MatrixOverRing.zeros(2)
        for coord, sigma in zip(self.m, PAULI):
            total = total + sigma * coord
        return total

    @property
    def is_hermitian(self):
        return all(coord.is_real for coord in self.m)

    def __getitem__(self, index):
        return self.m[index]

    def __iter__(self):
        return iter(self.m)


# ===================================================================
# ACTION POLYNOMIALS
# ===================================================================

def _real_coefficients(values, label):
    result = []
    for value in values:
        value = GaussianRational.coerce(value)
        if not value.is_real:
            raise NonRealActionError(f"{label} has non-real coefficient {value.to_text()}")
        result.append(value.re)
    while len(result) > 1 and result[-1] == 0:
        result.pop()
    return tuple(result) or (Fraction(0),)


def univariate(coefficients, variable):
    """Σ c_n x^n for a generator polynomial x"""
    result = SuperPolynomial.zero()
    power = SuperPolynomial.constant(1)
    for coeff in coefficients:
        if coeff:
            result = result + power.scale(coeff)
        power = power * variable
    return result


@dataclass(frozen=True)
class ActionPolynomial:
    """Either f (for tr f(D+M)) or the g-form Σ ρ^k g_k(M4)"""
    f: tuple = None
    g: tuple = None

    def __post_init__(self):
        if (self.f is None) == (self.g is None):
            raise MatrixModelError("give exactly one of f or g")
        if self.f is not None:
            object.__setattr__(self, "f", _real_coefficients(self.f, "f"))
        else:
            g = tuple(_real_coefficients(gk, f"g_{k}") for k, gk in enumerate(self.g))
            while len(g) > 1 and all(c == 0 for c in g[-1]):
                g = g[:-1]
            object.__setattr__(self, "g", g)

    @classmethod
    def from_f(cls, coefficients):
        return cls(f=tuple(coefficients))

    @classmethod
    def from_g(cls, g_list):
        return cls(g=tuple(tuple(gk) for gk in g_list))

    @property
    def is_g_form(self):
        return self.g is not None

    def to_polynomial(self, D=None):
        if self.f is not None:
            return spectral_action(self.f, D)
        result = SuperPolynomial.zero()
        for k, gk in enumerate(self.g):
            result = result + RHO ** k * univariate(gk, M4)
        return result

    def to_g_form(self):
        if self.is_g_form:
            return self
        return to_g_form(self.to_polynomial())


# ===================================================================
# SPECTRAL ACTION
# ===================================================================

def spectral_action(f, D=None, M=None):
    """S₀[D+M] = tr f(D+M) as an exact polynomial in M₁..M₄"""
    coefficients = _real_coefficients(f, "f")
    D = PauliVector.zero() if D is None else D
    M = PauliVector.symbolic() if M is None else M
    if not (D.is_hermitian and all(coord.is_constant for coord in D)):
        raise MatrixModelError("D must be a numeric hermitian Pauli vector")
    X = D.to_matrix() + M.to_matrix()
    identity = MatrixOverRing.identity(2)
    result = identity.scale(coefficients[-1])
    for coeff in reversed(coefficients[:-1]):
        result = result @ X + identity.scale(coeff)
    action = result.trace()
    logger.debug("tr f(D+M) for deg f = %d has %d terms", len(coefficients) - 1, len(action))
    return action


def closed_form_action(f):
    """Binomial double-sum expansion of tr f(M) in ρ and M₄"""
    mu = _real_coefficients(f, "f")
    result = SuperPolynomial.zero()
    for i, coeff in enumerate(mu):
        if not coeff:
            continue
        a = i // 2
        for s in range(a + 1):
            if i % 2 == 0:
                term = RHO ** (a - s) * M4 ** (2 * s)
                result = result + term.scale(coeff * comb(2 * a, 2 * s))
            else:
                term = RHO ** (a - s) * M4 ** (2 * s + 1)
                result = result + term.scale(coeff * comb(2 * a + 1, 2 * s + 1))
    return result.scale(2)


@timed
def check_closed_form(f, check_id="model.closed_form"):
    lhs = spectral_action(f)
    rhs = closed_form_action(f)
    return VerificationReport.from_identity(check_id, lhs, rhs, {"f": [str(c) for c in _real_coefficients(f, "f")]},
                                            output=lhs.to_text())


def eigen_invariants():
    """Elementary symmetric functions a₁ = 2M₄, a₂ = M₄² − ρ of the eigenvalues"""
    return M4.scale(2), M4 ** 2 - RHO


# ===================================================================
# GAUGE SYMMETRY
# ===================================================================

def _check_unitary(u):
    if u.shape != (2, 2) or not u.is_numeric:
        raise NonUnitaryError("gauge transformation must be a numeric 2x2 matrix")
    if u @ u.adjoint() != MatrixOverRing.identity(2):
        raise NonUnitaryError("u·u* ≠ 1")


def gauge_transform(u, M=None, D=None):
    """(u, M) ↦ u M u* + u[D, u*] in Pauli coordinates"""
    _check_unitary(u)
    M = PauliVector.symbolic() if M is None else M
    D = PauliVector.zero() if D is None else D
    u_star = u.adjoint()
    Dm = D.to_matrix()
    X = u @ M.to_matrix() @ u_star + u @ (Dm @ u_star - u_star @ Dm)
    return PauliVector.from_matrix(X)


def cayley_unitary(H):
    """u = (1 + iH)(1 − iH)⁻¹ for numeric hermitian H"""
    if not H.is_numeric or not H.is_self_adjoint:
        raise MatrixModelError("Cayley transform needs a numeric hermitian matrix")
    identity = MatrixOverRing.identity(H.n_rows)
    iH = H.scale(I)
    try:
        return (identity + iH) @ (identity - iH).inverse()
    except SingularMatrixError as exc:
        raise NonUnitaryError(f"1 - iH is singular: {exc}") from exc


def random_rational_hermitian(rng, bound=5):
    """2x2 hermitian matrix with small random rational entries"""
    def rational():
        return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))
    a, d = rational(), rational()
    off = GaussianRational(rational(), rational())
    return MatrixOverRing([[a, off], [off.conjugate(), d]])


@timed
def check_invariance(S0, samples, D=None, check_id="model.invariance", inputs=None):
    """S₀(u M u* + u[D,u*]) − S₀(M) = 0 for every sampled u"""
    residuals = {}
    for idx, u in enumerate(samples):
        image = gauge_transform(u, PauliVector.symbolic(), D)
        mapping = dict(zip(GAUGE_FIELDS, image.m))
        residuals[f"u{idx}"] = S0.substitute(mapping) - S0
    inputs = {"samples": len(samples), **(inputs or {})}
    return VerificationReport.from_residuals(check_id, residuals, inputs)


# ===================================================================
# RELATIONS AND CLASSIFICATION
# ===================================================================

RELATION_PAIRS = ((1, 2), (1, 3), (2, 3))


def relation_vector(i, j):
    """R^{(ij)}: component i is −M_j, component j is M_i"""
    fields = (M1, M2, M3, M4)
    vector = [SuperPolynomial.zero()] * 4
    vector[i - 1] = -fields[j - 1]
    vector[j - 1] = fields[i - 1]
    return tuple(vector)


def relations(S0, check_id="model.relations"):
    """First-level relations (∂_a S₀) R_a = 0 and the second-level relation"""
    gradient = [S0.left_derivative(sym) for sym in GAUGE_FIELDS]
    vectors = {f"R{i}{j}": relation_vector(i, j) for i, j in RELATION_PAIRS}
    residuals = {}
    for name, vector in vectors.items():
        contraction = SuperPolynomial.zero()
        for d, r in zip(gradient, vector):
            contraction = contraction + d * r
        residuals[name] = contraction
    second = [
        M1 * vectors["R23"][a] - M2 * vectors["R13"][a] + M3 * vectors["R12"][a]
        for a in range(4)
    ]
    for a, component in enumerate(second):
        residuals[f"second_level[{a + 1}]"] = component
    report = VerificationReport.from_residuals(check_id, residuals, {"S0": S0.to_text()})
    return report, vectors


def to_g_form(S0):
    """Rewrite a U(2)-invariant polynomial as Σ ρ^k g_k(M₄)"""
    S0 = SuperPolynomial.lift(S0)
    foreign = [sym.name for sym in S0.symbols if sym not in GAUGE_FIELDS]
    if foreign:
        raise ActionFormError(f"action depends on non-gauge generators {sorted(foreign)}")
    slice_ = S0.set_to_zero(GAUGE_FIELDS[1:3])
    g = {}
    for mono, coeff in slice_.items():
        e1 = mono.exponent(GAUGE_FIELDS[0])
        if e1 % 2:
            raise ActionFormError(f"{S0.to_text()} is not U(2)-invariant (odd power of M1)")
        if not coeff.is_real:
            raise ActionFormError(f"{S0.to_text()} has a non-real coefficient")
        g.setdefault(e1 // 2, {})[mono.exponent(GAUGE_FIELDS[3])] = coeff.re
    top = max(g, default=0)
    g_list = []
    for k in range(top + 1):
        powers = g.get(k, {})
        g_list.append(tuple(powers.get(n, Fraction(0)) for n in range(max(powers, default=0) + 1)))
    action = ActionPolynomial.from_g(g_list)
    if action.to_polynomial() != S0:
        raise ActionFormError(f"{S0.to_text()} is not U(2)-invariant")
    return action


class GaugeCase(Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"


@dataclass(frozen=True)
class ClassificationResult:
    case: GaugeCase
    witness: SuperPolynomial
    action: ActionPolynomial

    def to_dict(self):
        return {
            "case": self.case.value,
            "witness": self.witness.to_text() if self.witness is not None else None,
            "g": [[str(c) for c in gk] for gk in self.action.g],
        }


_RHO_SYM, _M_SYM = sympy.symbols("rho m")


def _to_sympy(action):
    expr = sympy.Integer(0)
    for k, gk in enumerate(action.g):
        for n, coeff in enumerate(gk):
            if coeff:
                expr += sympy.Rational(coeff.numerator, coeff.denominator) * _RHO_SYM ** k * _M_SYM ** n
    return sympy.Poly(expr, _RHO_SYM, _M_SYM, domain=sympy.QQ)


def _from_sympy(poly):
    result = SuperPolynomial.zero()
    for (k, n), coeff in poly.terms():
        coeff = sympy.Rational(coeff)
        result = result + (RHO ** k * M4 ** n).scale(Fraction(int(coeff.p), int(coeff.q)))
    return result


def classify(action):
    """Case 1 / 2 / 3 of the extended space from GCD(∂₁S₀, …, ∂₄S₀)"""
    if isinstance(action, SuperPolynomial):
        action = to_g_form(action)
    elif not action.is_g_form:
        action = action.to_g_form()
    G = _to_sympy(action)
    if G.is_zero:
        raise ZeroActionError("cannot classify the zero action")
    # ∂_i S₀ = 2 M_i ∂_ρG for i ≤ 3 and ∂₄S₀ = ∂_mG; the M_i are pairwise coprime
    h = G.diff(_RHO_SYM)
    if h.is_zero:
        result = ClassificationResult(GaugeCase.CASE1, None, action)
    else:
        gcd = sympy.gcd(h, G.diff(_M_SYM))
        if gcd.total_degree() == 0:
            result = ClassificationResult(GaugeCase.CASE2, SuperPolynomial.constant(1), action)
        else:
            result = ClassificationResult(GaugeCase.CASE3, _from_sympy(gcd.monic()), action)
    logger.info("classified action as %s", result.case.value)
    return result
