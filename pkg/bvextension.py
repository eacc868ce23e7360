"""BV extension of the gauge-fixed U(2) model."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from antibracket import FieldRegistry, antibracket, make_antifield
from matrixmodel import GAUGE_FIELDS, GaugeCase, classify
from superalgebra import (
    FieldKind,
    FieldSymbol,
    MIXED,
    SuperAlgebraError,
    SuperPolynomial,
)

logger = logging.getLogger(__name__)


class BVExtensionError(SuperAlgebraError):
    """Base error for the BV construction"""


class InvalidParameterError(BVExtensionError):
    """Zero α_i or β, or T outside Pol(M_a)"""


class InvalidGaugeFermionError(BVExtensionError):
    """Ψ contains antifields or is not odd of degree −1"""


def levi_civita(i, j, k):
    return (i - j) * (j - k) * (k - i) // 2


# ===================================================================
# EXTENDED SPACES
# ===================================================================

GHOSTS = tuple(FieldSymbol(f"C{i}", 1, FieldKind.GHOST) for i in range(1, 4))
GHOST_FOR_GHOST = FieldSymbol("E", 2, FieldKind.GHOST)


@dataclass(frozen=True)
class ExtendedSpace:
    """Graded configuration space with its field/antifield pairing"""
    registry: FieldRegistry
    case: GaugeCase = GaugeCase.CASE2
    by_degree: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        grouped = {}
        for sym in self.registry.generators:
            grouped.setdefault(sym.ghost_degree, []).append(sym)
        ordered = {deg: tuple(sorted(syms, key=lambda s: s.sort_key)) for deg, syms in sorted(grouped.items())}
        object.__setattr__(self, "by_degree", ordered)

    def symbol(self, name):
        return self.registry.symbol(name)

    def poly(self, name):
        return self.registry.poly(name)

    def degree_of(self, name):
        return self.symbol(name).ghost_degree

    def parity_of(self, name):
        return self.symbol(name).parity

    @property
    def generators(self):
        return self.registry.generators

    @property
    def degree_zero_fields(self):
        return tuple(s for s in self.by_degree.get(0, ()) if s.kind is not FieldKind.ANTIFIELD)

    @property
    def gauge_fields(self):
        return tuple(s for s in self.registry.fields if s.kind is FieldKind.GAUGE)


def build_extended_space():
    """Fields, ghosts and antifields for the Case 2 action"""
    registry = FieldRegistry.from_fields(GAUGE_FIELDS + GHOSTS + (GHOST_FOR_GHOST,))
    return ExtendedSpace(registry, GaugeCase.CASE2)


def build_case1_space():
    return ExtendedSpace(FieldRegistry.from_fields(GAUGE_FIELDS), GaugeCase.CASE1)


def build_case3_space():
    """Case 3 registry, degree bookkeeping only"""
    fields = (
        GAUGE_FIELDS
        + tuple(FieldSymbol(f"C{i}", 1, FieldKind.GHOST) for i in range(1, 7))
        + tuple(FieldSymbol(f"E{i}", 2, FieldKind.GHOST) for i in range(1, 5))
        + (FieldSymbol("K", 3, FieldKind.GHOST),)
    )
    return ExtendedSpace(FieldRegistry.from_fields(fields), GaugeCase.CASE3)


def build_space_for(action):
    result = classify(action)
    builders = {
        GaugeCase.CASE1: build_case1_space,
        GaugeCase.CASE2: build_extended_space,
        GaugeCase.CASE3: build_case3_space,
    }
    return builders[result.case]()


# ===================================================================
# EXTENDED ACTION
# ===================================================================

def _check_parameters(alpha, beta):
    alpha = tuple(Fraction(a) for a in alpha)
    beta = Fraction(beta)
    if len(alpha) != 3:
        raise InvalidParameterError("alpha needs exactly three entries")
    if any(a == 0 for a in alpha):
        raise InvalidParameterError(f"alpha entries must be nonzero, got {[str(a) for a in alpha]}")
    if beta == 0:
        raise InvalidParameterError("beta must be nonzero")
    return alpha, beta


def _check_gauge_polynomial(poly, label):
    poly = SuperPolynomial.lift(poly)
    foreign = [sym.name for sym in poly.symbols if sym not in GAUGE_FIELDS]
    if foreign:
        raise InvalidParameterError(f"{label} must be a polynomial in M1..M4, found {sorted(foreign)}")
    return poly


def build_S_BV(alpha=(1, 1, 1), beta=1, T=0, space=None):
    """Extended action, linear in antifields"""
    alpha, beta = _check_parameters(alpha, beta)
    T = _check_gauge_polynomial(T, "T")
    space = build_extended_space() if space is None else space
    M = {i: space.poly(f"M{i}") for i in range(1, 4)}
    M_star = {i: space.poly(f"M{i}*") for i in range(1, 4)}
    C = {i: space.poly(f"C{i}") for i in range(1, 4)}
    C_star = {i: space.poly(f"C{i}*") for i in range(1, 4)}
    E = space.poly("E")
    a = dict(zip((1, 2, 3), alpha))

    action = SuperPolynomial.zero()
    for i, j, k in permutations((1, 2, 3)):
        eps = levi_civita(i, j, k)
        action = action + (M_star[i] * M[j] * C[k]).scale(eps * a[k])
        weight = a[j] * a[k] / (2 * a[i])
        action = action + (C_star[i] * M[i] * E).scale(weight * beta * a[i])
        action = action + (C_star[i] * C[j] * C[k]).scale(weight * eps)
    if not T.is_zero:
        for i in (1, 2, 3):
            inner = SuperPolynomial.zero()
            for p, q, r in permutations((1, 2, 3)):
                coeff = levi_civita(p, q, r) * a[q] * a[r] / (2 * a[i])
                inner = inner + (M[p] * C[q] * C[r]).scale(coeff)
            action = action + C_star[i] * M[i] * T * inner
    logger.debug("S_BV with alpha=%s beta=%s has %d terms", alpha, beta, len(action))
    return action


def nonconforming_terms(S_BV):
    """Terms of S_BV outside the allowed shape"""
    bad = SuperPolynomial.zero()
    for mono, coeff in S_BV.items():
        counts = {FieldKind.ANTIFIELD: 0, FieldKind.GHOST: 0}
        for sym in mono.odd_part:
            if sym.kind in counts:
                counts[sym.kind] += 1
        for sym, exp in mono.even_part:
            if sym.kind in counts:
                counts[sym.kind] += exp
        if counts[FieldKind.ANTIFIELD] != 1 or counts[FieldKind.GHOST] > 2 or mono.ghost_degree != 0:
            bad = bad + SuperPolynomial({mono: coeff})
    return bad


def build_S_tilde(S0, S_BV):
    S0 = _check_gauge_polynomial(S0, "S0")
    return S0 + S_BV


def restrict_to_gauge_fields(S, space):
    """S|_{X₀}: every non-gauge generator set to zero"""
    return S.restrict_to(space.gauge_fields)


# ===================================================================
# TRIVIAL PAIRS
# ===================================================================

@dataclass(frozen=True)
class TrivialPair:
    B: FieldSymbol
    h: FieldSymbol
    level: int
    index: int


@dataclass(frozen=True)
class TrivialPairSet:
    pairs: tuple
    level: int

    @property
    def registry_pairs(self):
        result = []
        for pair in self.pairs:
            result.append((pair.B, make_antifield(pair.B)))
            result.append((pair.h, make_antifield(pair.h)))
        return tuple(result)

    def degrees(self):
        return [(pair.B.ghost_degree, pair.h.ghost_degree) for pair in self.pairs]


def trivial_pair_degree(i, j):
    """deg(B_i^j): j − i − 2 for odd j, i − j + 1 for even j"""
    return j - i - 2 if j % 2 else i - j + 1


# three pairs follow the three ghosts C_i, two follow the ghost-for-ghost E
U2_MULTIPLICITIES = {(0, 1): 3, (1, 1): 1, (1, 2): 1}


def _pair_names(i, j, n, multiplicity):
    if (i, j) == (0, 1):
        return f"B{n}", f"h{n}"
    if i == 1:
        suffix = "" if multiplicity == 1 else f"_{n}"
        return f"A{j}{suffix}", f"k{j}{suffix}"
    return f"B{i}_{j}_{n}", f"h{i}_{j}_{n}"


def build_trivial_pairs(level=1, multiplicities=None):
    """Trivial pairs up to the given level"""
    if level < 0:
        raise BVExtensionError("reducibility level must be non-negative")
    if multiplicities is None:
        multiplicities = U2_MULTIPLICITIES if level == 1 else {}
    pairs = []
    for i in range(level + 1):
        for j in range(1, i + 2):
            count = multiplicities.get((i, j), 1)
            degree = trivial_pair_degree(i, j)
            for n in range(1, count + 1):
                b_name, h_name = _pair_names(i, j, n, count)
                pairs.append(TrivialPair(
                    FieldSymbol(b_name, degree, FieldKind.AUXILIARY),
                    FieldSymbol(h_name, degree + 1, FieldKind.AUXILIARY),
                    i,
                    j,
                ))
    return TrivialPairSet(tuple(pairs), level)


def build_total_space(space=None, trivial_pairs=None):
    """Extended space plus the trivial pairs"""
    space = build_extended_space() if space is None else space
    trivial_pairs = build_trivial_pairs() if trivial_pairs is None else trivial_pairs
    return ExtendedSpace(space.registry.extended(trivial_pairs.registry_pairs), space.case)


def build_S_aux(trivial_pairs=None):
    trivial_pairs = build_trivial_pairs() if trivial_pairs is None else trivial_pairs
    action = SuperPolynomial.zero()
    for pair in trivial_pairs.pairs:
        action = action + SuperPolynomial.generator(make_antifield(pair.B)) * SuperPolynomial.generator(pair.h)
    return action


def build_S_tot(S_tilde, trivial_pairs=None):
    return S_tilde + build_S_aux(trivial_pairs)


# ===================================================================
# GAUGE FIXING
# ===================================================================

@dataclass(frozen=True)
class GaugeFixingFermion:
    """Odd functional Ψ of degree −1 in the field sector"""
    psi: SuperPolynomial

    def __post_init__(self):
        psi = SuperPolynomial.lift(self.psi)
        if psi.contains_kind(FieldKind.ANTIFIELD):
            raise InvalidGaugeFermionError(f"gauge-fixing fermion {psi.to_text()} contains antifields")
        degree = psi.ghost_degree
        if not psi.is_zero and (degree == MIXED or degree != -1):
            raise InvalidGaugeFermionError(f"gauge-fixing fermion must have degree -1, got {degree}")
        object.__setattr__(self, "psi", psi)


def _as_fermion(psi):
    return psi if isinstance(psi, GaugeFixingFermion) else GaugeFixingFermion(psi)


def lagrangian_map(psi, registry):
    """Antifield substitutions fixed by the gauge fermion"""
    psi = _as_fermion(psi).psi
    registry.check_registered(psi)
    return {registry.antifield_of(fld): psi.left_derivative(fld) for fld in registry.fields}


def gauge_fix(S, psi, registry):
    """Restrict S to the Lagrangian submanifold of psi"""
    fixed = S.substitute(lagrangian_map(psi, registry))
    logger.debug("gauge-fixed action has %d terms", len(fixed))
    return fixed


def gauge_fixed_brst(S, psi, g, registry):
    """Gauge-fixed BRST image of g"""
    return gauge_fix(antibracket(S, g, registry), psi, registry)


def gauge_fixed_square_residuals(S, psi, registry, generators):
    """Square of the gauge-fixed BRST map on each generator"""
    residuals = {}
    for sym in generators:
        first = gauge_fixed_brst(S, psi, SuperPolynomial.lift(sym), registry)
        residuals[sym.name] = gauge_fixed_brst(S, psi, first, registry)
    return residuals