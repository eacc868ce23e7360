"""Finite real spectral triples over the Gaussian rationals or super-polynomials."""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from expression_parser import parse_expression
from superalgebra import (
    FieldKind,
    FieldSymbol,
    GaussianRational,
    SuperAlgebraError,
    SuperPolynomial,
    symbol_table,
)
from verification_report import VerificationReport, condition, timed

logger = logging.getLogger(__name__)


class SpectralTripleError(SuperAlgebraError):
    """Base error for spectral-triple data"""


class RealStructureError(SpectralTripleError):
    """J is not an anti-linear isometry with J² = ±1"""


class NotSelfAdjointError(SpectralTripleError):
    """Operator differs from its adjoint"""


class GradingError(SpectralTripleError):
    """Grading is not a self-adjoint involution"""


class SingularMatrixError(SpectralTripleError):
    """Matrix has no inverse over the Gaussian rationals"""


class TripleFormatError(SpectralTripleError):
    """Malformed JSON triple description"""


# ===================================================================
# MATRICES
# ===================================================================

class MatrixOverRing:
    """Dense matrix with SuperPolynomial entries; products keep left-to-right order"""

    def __init__(self, rows):
        rows = tuple(tuple(SuperPolynomial.lift(entry) for entry in row) for row in rows)
        if rows and len({len(row) for row in rows}) != 1:
            raise SpectralTripleError("matrix rows must have equal length")
        self.rows = rows

    @classmethod
    def from_function(cls, n_rows, n_cols, entry):
        return cls([[entry(i, j) for j in range(n_cols)] for i in range(n_rows)])

    @classmethod
    def zeros(cls, n_rows, n_cols=None):
        n_cols = n_rows if n_cols is None else n_cols
        zero = SuperPolynomial.zero()
        return cls([[zero] * n_cols for _ in range(n_rows)])

    @classmethod
    def identity(cls, n):
        return cls.from_function(n, n, lambda i, j: 1 if i == j else 0)

    @classmethod
    def diagonal(cls, entries):
        entries = list(entries)
        return cls.from_function(len(entries), len(entries), lambda i, j: entries[i] if i == j else 0)

    @classmethod
    def block(cls, blocks):
        """Assemble from a grid of matrices"""
        rows = []
        for block_row in blocks:
            height = block_row[0].n_rows
            if any(blk.n_rows != height for blk in block_row):
                raise SpectralTripleError("blocks in one row must have equal height")
            for i in range(height):
                rows.append([entry for blk in block_row for entry in blk.rows[i]])
        return cls(rows)

    @property
    def n_rows(self):
        return len(self.rows)

    @property
    def n_cols(self):
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    def __getitem__(self, index):
        i, j = index
        return self.rows[i][j]

    def map_entries(self, func):
        return MatrixOverRing([[func(entry) for entry in row] for row in self.rows])

    # ---------------------------------------------------------------
    # arithmetic
    # ---------------------------------------------------------------

    def _check_shape(self, other):
        if self.shape != other.shape:
            raise SpectralTripleError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_shape(other)
        return MatrixOverRing([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check_shape(other)
        return MatrixOverRing([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map_entries(lambda entry: -entry)

    def scale(self, scalar):
        return self.map_entries(lambda entry: entry.scale(scalar))

    def __mul__(self, scalar):
        if isinstance(scalar, SuperPolynomial):
            return self.map_entries(lambda entry: entry * scalar)
        return self.scale(scalar)

    def __rmul__(self, scalar):
        if isinstance(scalar, SuperPolynomial):
            return self.map_entries(lambda entry: scalar * entry)
        return self.scale(scalar)

    def __matmul__(self, other):
        if isinstance(other, MatrixOverRing):
            if self.n_cols != other.n_rows:
                raise SpectralTripleError(f"cannot multiply {self.shape} by {other.shape}")
            columns = list(zip(*other.rows))
            return MatrixOverRing([[_dot(row, col) for col in columns] for row in self.rows])
        return self.apply(other)

    def apply(self, vector):
        """(Dφ)_k = Σ_l D_kl·φ_l"""
        vector = tuple(SuperPolynomial.lift(entry) for entry in vector)
        if len(vector) != self.n_cols:
            raise SpectralTripleError(f"vector of length {len(vector)} for a {self.shape} matrix")
        return tuple(_dot(row, vector) for row in self.rows)

    def commutator(self, other):
        return self @ other - other @ self

    def anticommutator(self, other):
        return self @ other + other @ self

    def transpose(self):
        return MatrixOverRing(list(zip(*self.rows)))

    def conjugate(self):
        return self.map_entries(lambda entry: entry.conjugate())

    def adjoint(self):
        return self.transpose().conjugate()

    def trace(self):
        total = SuperPolynomial.zero()
        for i in range(min(self.shape)):
            total = total + self.rows[i][i]
        return total

    def substitute(self, mapping):
        return self.map_entries(lambda entry: entry.substitute(mapping))

    def direct_sum(self, other):
        return MatrixOverRing.block([
            [self, MatrixOverRing.zeros(self.n_rows, other.n_cols)],
            [MatrixOverRing.zeros(other.n_rows, self.n_cols), other],
        ])

    # ---------------------------------------------------------------
    # predicates
    # ---------------------------------------------------------------

    @property
    def is_zero(self):
        return all(entry.is_zero for row in self.rows for entry in row)

    @property
    def is_numeric(self):
        return all(entry.is_constant for row in self.rows for entry in row)

    @property
    def is_self_adjoint(self):
        return self == self.adjoint()

    def first_nonzero(self):
        for i, row in enumerate(self.rows):
            for j, entry in enumerate(row):
                if not entry.is_zero:
                    return i, j, entry
        return None

    def __eq__(self, other):
        if not isinstance(other, MatrixOverRing):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def numeric_rows(self):
        if not self.is_numeric:
            raise SpectralTripleError("matrix has symbolic entries")
        return [[entry.constant_value() for entry in row] for row in self.rows]

    def inverse(self):
        """Gauss-Jordan inverse of a numeric square matrix"""
        n = self.n_rows
        if n != self.n_cols:
            raise SingularMatrixError("only square matrices are invertible")
        work = [row + [GaussianRational(1 if i == j else 0) for j in range(n)]
                for i, row in enumerate(self.numeric_rows())]
        for col in range(n):
            pivot = next((r for r in range(col, n) if not work[r][col].is_zero), None)
            if pivot is None:
                raise SingularMatrixError("matrix is singular")
            work[col], work[pivot] = work[pivot], work[col]
            factor = work[col][col]
            work[col] = [value / factor for value in work[col]]
            for r in range(n):
                if r != col and not work[r][col].is_zero:
                    scale = work[r][col]
                    work[r] = [a - scale * b for a, b in zip(work[r], work[col])]
        return MatrixOverRing([row[n:] for row in work])

    def to_text_rows(self):
        return [[entry.to_text() for entry in row] for row in self.rows]

    def __repr__(self):
        return f"MatrixOverRing({self.to_text_rows()!r})"


def _dot(row, column):
    total = SuperPolynomial.zero()
    for a, b in zip(row, column):
        if a.is_zero or b.is_zero:
            continue
        total = total + a * b
    return total


def inner_product(u, w):
    """⟨u, w⟩ = Σ conj(u_k)·w_k, anti-linear in the first slot"""
    if len(u) != len(w):
        raise SpectralTripleError("vectors of different length")
    total = SuperPolynomial.zero()
    for a, b in zip(u, w):
        a, b = SuperPolynomial.lift(a), SuperPolynomial.lift(b)
        if a.is_zero or b.is_zero:
            continue
        total = total + a.conjugate() * b
    return total


# ===================================================================
# KO-DIMENSION
# ===================================================================

@dataclass(frozen=True)
class KOSignature:
    n: int
    epsilon: int
    epsilon_prime: int
    epsilon_double_prime: int = None

    @property
    def is_even(self):
        return self.n % 2 == 0


KO_TABLE = {
    0: KOSignature(0, 1, 1, 1),
    1: KOSignature(1, 1, -1),
    2: KOSignature(2, -1, 1, -1),
    3: KOSignature(3, -1, 1),
    4: KOSignature(4, -1, 1, 1),
    5: KOSignature(5, -1, -1),
    6: KOSignature(6, 1, 1, -1),
    7: KOSignature(7, 1, 1),
}


def ko_signature(n):
    return KO_TABLE[n % 8]


@dataclass(frozen=True)
class RealStructure:
    """Anti-linear isometry J(v) = U·conj(v) with U unitary"""
    U: MatrixOverRing
    _inverse: MatrixOverRing = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.U.is_numeric:
            raise RealStructureError("U must have numeric entries")
        n = self.U.n_rows
        if self.U @ self.U.adjoint() != MatrixOverRing.identity(n):
            raise RealStructureError("J is not an isometry: U·U* ≠ 1")
        object.__setattr__(self, "_inverse", self.U.adjoint())

    @classmethod
    def scalar(cls, n, value):
        return cls(MatrixOverRing.identity(n).scale(value))

    @property
    def dim(self):
        return self.U.n_rows

    def apply(self, vector):
        return self.U.apply([SuperPolynomial.lift(entry).conjugate() for entry in vector])

    def conjugate_operator(self, operator):
        """J·A·J⁻¹ = U·conj(A)·U⁻¹"""
        return self.U @ operator.conjugate() @ self._inverse

    def square_sign(self):
        """ε with J² = ε, or None when J² is not ±1"""
        square = self.U @ self.U.conjugate()
        identity = MatrixOverRing.identity(self.dim)
        if square == identity:
            return 1
        if square == -identity:
            return -1
        return None

    def opposite(self, b):
        """J b* J⁻¹"""
        return self.conjugate_operator(b.adjoint())


# ===================================================================
# SPECTRAL TRIPLES
# ===================================================================

@dataclass(frozen=True)
class FiniteSpectralTriple:
    algebra: tuple
    D: MatrixOverRing
    J: RealStructure = None
    gamma: MatrixOverRing = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "algebra", tuple(self.algebra))
        n = self.D.n_rows
        if self.D.shape != (n, n):
            raise SpectralTripleError("D must be square")
        for a in self.algebra:
            if a.shape != (n, n):
                raise SpectralTripleError(f"algebra element of shape {a.shape} on a space of dimension {n}")
        if self.J is not None and self.J.dim != n:
            raise SpectralTripleError("J acts on a space of different dimension")
        if self.gamma is not None:
            if self.gamma.shape != (n, n):
                raise GradingError("grading has the wrong shape")
            if not self.gamma.is_self_adjoint:
                raise GradingError("grading is not self-adjoint")
            if self.gamma @ self.gamma != MatrixOverRing.identity(n):
                raise GradingError("grading does not square to 1")
        if not self.D.is_self_adjoint:
            raise NotSelfAdjointError(f"D of {self.name or 'triple'} is not self-adjoint")

    @property
    def dim(self):
        return self.D.n_rows

    def with_operator(self, D, name=None):
        return FiniteSpectralTriple(self.algebra, D, self.J, self.gamma, name or self.name)


def matrix_residual(residuals, name, matrix):
    """Record a matrix that must vanish by its first nonzero entry"""
    hit = matrix.first_nonzero()
    if hit is None:
        residuals[name] = SuperPolynomial.zero()
    else:
        i, j, entry = hit
        residuals[f"{name}[{i},{j}]"] = entry


def _order_conditions(residuals, D, J, algebra):
    """Commutation rule and first-order condition over ordered pairs"""
    opposites = [J.opposite(b) for b in algebra]
    commutators = [D.commutator(a) for a in algebra]
    for ia, a in enumerate(algebra):
        for ib, b_opp in enumerate(opposites):
            matrix_residual(residuals, f"commutation(a{ia},b{ib})", a.commutator(b_opp))
            matrix_residual(residuals, f"first_order(a{ia},b{ib})", commutators[ia].commutator(b_opp))


@timed
def check_real_structure(st, n, check_id=None, inputs=None):
    """Axioms of a real spectral triple of KO-dimension n"""
    if st.J is None:
        raise RealStructureError("triple has no real structure")
    signature = ko_signature(n)
    J, D = st.J, st.D
    residuals = {"J^2=epsilon": condition(J.square_sign() == signature.epsilon)}
    matrix_residual(residuals, "JD=epsilon'DJ", J.conjugate_operator(D) - D.scale(signature.epsilon_prime))
    if st.gamma is not None:
        gamma = st.gamma
        matrix_residual(residuals, "D.gamma=-gamma.D", D.anticommutator(gamma))
        for ia, a in enumerate(st.algebra):
            matrix_residual(residuals, f"gamma.a{ia}=a{ia}.gamma", gamma.commutator(a))
        if not signature.is_even:
            residuals["grading in odd KO-dimension"] = condition(False)
        else:
            matrix_residual(residuals, "J.gamma=epsilon''gamma.J",
                             J.conjugate_operator(gamma) - gamma.scale(signature.epsilon_double_prime))
    _order_conditions(residuals, D, J, st.algebra)
    inputs = {"n": n % 8, "triple": st.name, **(inputs or {})}
    return VerificationReport.from_residuals(check_id or f"triple.ko{n % 8}", residuals, inputs)


def decompose_mixed(D, J):
    """D = D₁ + D₂ with J D₁ = −D₁ J and J D₂ = D₂ J"""
    if J.square_sign() is None:
        raise RealStructureError("mixed decomposition needs J² = ±1")
    conjugated = J.conjugate_operator(D)
    half = Fraction(1, 2)
    D2 = (D + conjugated).scale(half)
    D1 = (D - conjugated).scale(half)
    return D1, D2


@timed
def check_mixed_ko(st, check_id=None, inputs=None):
    """Definition of a real spectral triple with mixed KO-dimension"""
    J, D = st.J, st.D
    if J is None:
        raise RealStructureError("triple has no real structure")
    residuals = {"J^2=+-1": condition(J.square_sign() is not None)}
    if J.square_sign() is None:
        return VerificationReport.from_residuals(check_id or "triple.mixed", residuals, inputs)
    D1, D2 = decompose_mixed(D, J)
    matrix_residual(residuals, "JD1=-D1J", J.conjugate_operator(D1) + D1)
    matrix_residual(residuals, "JD2=D2J", J.conjugate_operator(D2) - D2)
    residuals["D1 self-adjoint"] = condition(D1.is_self_adjoint)
    residuals["D2 self-adjoint"] = condition(D2.is_self_adjoint)
    matrix_residual(residuals, "D1+D2=D", D1 + D2 - D)
    if st.gamma is not None and not D1.is_zero and not D2.is_zero:
        residuals["genuinely mixed even case"] = condition(False)
    _order_conditions(residuals, D, J, st.algebra)
    inputs = {"triple": st.name, **(inputs or {})}
    return VerificationReport.from_residuals(check_id or "triple.mixed", residuals, inputs)


# ===================================================================
# ACTIONS AND FORMS
# ===================================================================

def fermionic_action(st, phi, D=None):
    """½⟨Jφ, Dφ⟩, or ½⟨φ, Dφ⟩ without a real structure"""
    D = st.D if D is None else D
    left = st.J.apply(phi) if st.J is not None else tuple(SuperPolynomial.lift(x) for x in phi)
    return inner_product(left, D.apply(phi)).scale(Fraction(1, 2))


def bilinear_form(st, D, phi, psi):
    """𝔄_D(φ, ψ) = ⟨Jφ, Dψ⟩"""
    return inner_product(st.J.apply(phi), D.apply(psi))


@timed
def bilinear_symmetry_check(st, D1, D2, samples, check_id="triple.bilinear", inputs=None):
    """𝔄_{D₁} is (anti)symmetric and 𝔄_{D₂} the opposite, depending on J²"""
    epsilon = st.J.square_sign()
    if epsilon is None:
        raise RealStructureError("bilinear forms need J² = ±1")
    sign_d1, sign_d2 = -epsilon, epsilon
    residuals = {}
    for idx, (phi, psi) in enumerate(samples):
        residuals[f"A_D1 sample {idx}"] = (
            bilinear_form(st, D1, phi, psi) - bilinear_form(st, D1, psi, phi).scale(sign_d1)
        )
        residuals[f"A_D2 sample {idx}"] = (
            bilinear_form(st, D2, phi, psi) - bilinear_form(st, D2, psi, phi).scale(sign_d2)
        )
    inputs = {"epsilon": epsilon, "samples": len(samples), **(inputs or {})}
    return VerificationReport.from_residuals(check_id, residuals, inputs)


def linear_form(st, v, chi, D=None):
    """L_D(χ) = ½(⟨Jv, Dχ⟩ + ⟨Jχ, Dv⟩)"""
    D = st.D if D is None else D
    first = inner_product(st.J.apply(v), D.apply(chi))
    second = inner_product(st.J.apply(chi), D.apply(v))
    return (first + second).scale(Fraction(1, 2))


@timed
def verify_subalgebra_conditions(D, J, generators, check_id="triple.subalgebra", inputs=None):
    """Commutation rule and first-order condition for candidate generators"""
    residuals = {}
    _order_conditions(residuals, D, J, list(generators))
    inputs = {"generators": len(generators), **(inputs or {})}
    return VerificationReport.from_residuals(check_id, residuals, inputs)


# ===================================================================
# JSON FORMAT
# ===================================================================

def _parse_matrix(raw, dim, table, label):
    if raw and not isinstance(raw[0], list):
        if len(raw) != dim * dim:
            raise TripleFormatError(f"{label} must have {dim * dim} entries")
        raw = [raw[i * dim:(i + 1) * dim] for i in range(dim)]
    if len(raw) != dim or any(len(row) != dim for row in raw):
        raise TripleFormatError(f"{label} must be {dim}x{dim}")
    return MatrixOverRing([[parse_expression(str(entry), table) for entry in row] for row in raw])


def _symbols_from_json(raw):
    symbols = []
    for item in raw:
        try:
            symbols.append(FieldSymbol(item["name"], int(item["degree"]), FieldKind(item.get("kind", "antifield"))))
        except (KeyError, ValueError) as exc:
            raise TripleFormatError(f"bad symbol entry {item!r}: {exc}") from exc
    return symbols


def triple_from_dict(data, name=""):
    """Build a triple from the JSON description"""
    try:
        dim = int(data["dim"])
        if "symbols" in data:
            symbols = _symbols_from_json(data["symbols"])
        else:
            from bvtriples import default_triple_symbols
            symbols = default_triple_symbols()
        table = symbol_table(symbols)
        D = _parse_matrix(data["D"], dim, table, "D")
        J = None
        if data.get("J") is not None:
            J = RealStructure(_parse_matrix(data["J"]["U"], dim, table, "J.U"))
            declared = data["J"].get("epsilon")
            if declared is not None and J.square_sign() != int(declared):
                raise TripleFormatError(f"J.epsilon={declared} but U·conj(U) gives {J.square_sign()}")
        gamma = _parse_matrix(data["gamma"], dim, table, "gamma") if data.get("gamma") else None
        algebra = [_parse_matrix(m, dim, table, f"algebra[{k}]") for k, m in enumerate(data.get("algebra", []))]
    except KeyError as exc:
        raise TripleFormatError(f"missing key {exc}") from exc
    return FiniteSpectralTriple(tuple(algebra), D, J, gamma, name or data.get("name", ""))


def load_triple(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TripleFormatError(f"{path}: {exc}") from exc
    logger.info("loaded triple description from %s", path)
    return triple_from_dict(data, name=path.stem)


def triple_to_dict(st, symbols=None):
    data = {
        "name": st.name,
        "dim": st.dim,
        "D": st.D.to_text_rows(),
        "algebra": [a.to_text_rows() for a in st.algebra],
    }
    if st.J is not None:
        data["J"] = {"U": st.J.U.to_text_rows(), "epsilon": st.J.square_sign()}
    if st.gamma is not None:
        data["gamma"] = st.gamma.to_text_rows()
    if symbols is not None:
        data["symbols"] = [{"name": s.name, "degree": s.ghost_degree, "kind": s.kind.value} for s in symbols]
    return data
