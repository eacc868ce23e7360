"""Antibracket, classical master equation and BRST differential."""

import logging
from dataclasses import dataclass, field

from superalgebra import (
    FieldKind,
    FieldSymbol,
    SuperAlgebraError,
    SuperPolynomial,
    symbol_table,
)
from verification_report import VerificationReport, timed

logger = logging.getLogger(__name__)

# {φ, φ*} = BRACKET_SIGN for every registered pair; {φ*, φ} = -BRACKET_SIGN
BRACKET_SIGN = 1


class AntibracketError(SuperAlgebraError):
    """Base error for bracket computations"""


class UnregisteredGeneratorError(AntibracketError):
    """Expression uses a generator outside the registry"""


class RegistryError(AntibracketError):
    """Field/antifield pairing violates the degree law"""


class NotDegreeZeroError(AntibracketError):
    """Master equation requested for an action that is not of ghost degree 0"""


def make_antifield(field_symbol):
    """Antifield partner: deg(φ*) = −deg(φ) − 1"""
    return FieldSymbol(f"{field_symbol.name}*", -field_symbol.ghost_degree - 1, FieldKind.ANTIFIELD)


@dataclass(frozen=True)
class FieldRegistry:
    """Field/antifield pairing table of an extended configuration space"""
    pairs: tuple
    _by_name: dict = field(init=False, repr=False, compare=False)
    _partner: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple(tuple(pair) for pair in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        partner = {}
        for fld, anti in pairs:
            if anti.ghost_degree != -fld.ghost_degree - 1:
                raise RegistryError(
                    f"{anti.name} has degree {anti.ghost_degree}, expected {-fld.ghost_degree - 1}"
                )
            if anti.parity != (1 - fld.parity) % 2:
                raise RegistryError(f"{anti.name} must have the opposite parity of {fld.name}")
            if fld in partner or anti in partner:
                raise RegistryError(f"{fld.name} or {anti.name} is paired twice")
            partner[fld] = anti
            partner[anti] = fld
        object.__setattr__(self, "_by_name", symbol_table(partner))
        object.__setattr__(self, "_partner", partner)

    @classmethod
    def from_fields(cls, fields):
        return cls(tuple((fld, make_antifield(fld)) for fld in fields))

    def extended(self, more_pairs):
        return FieldRegistry(self.pairs + tuple(more_pairs))

    @property
    def fields(self):
        return tuple(fld for fld, _ in self.pairs)

    @property
    def antifields(self):
        return tuple(anti for _, anti in self.pairs)

    @property
    def generators(self):
        return self.fields + self.antifields

    @property
    def names(self):
        return dict(self._by_name)

    def symbol(self, name):
        try:
            return self._by_name[name]
        except KeyError:
            raise UnregisteredGeneratorError(f"'{name}' is not a registered generator") from None

    def poly(self, name):
        return SuperPolynomial.generator(self.symbol(name))

    def antifield_of(self, fld):
        return self._partner[fld]

    def partner(self, sym):
        return self._partner[sym]

    def __contains__(self, sym):
        return sym in self._partner

    def check_registered(self, *polys):
        for poly in polys:
            for sym in poly.symbols:
                if sym not in self._partner:
                    raise UnregisteredGeneratorError(f"generator '{sym.name}' is not in the registry")


# ===================================================================
# BRACKET
# ===================================================================

def antibracket(F, G, reg):
    """{F,G} = Σ ∂ᵣF/∂φ ∂ₗG/∂φ* − ∂ᵣF/∂φ* ∂ₗG/∂φ"""
    F = SuperPolynomial.lift(F)
    G = SuperPolynomial.lift(G)
    reg.check_registered(F, G)
    f_symbols, g_symbols = F.symbols, G.symbols
    result = SuperPolynomial.zero()
    for fld, anti in reg.pairs:
        if fld in f_symbols and anti in g_symbols:
            result = result + F.right_derivative(fld) * G.left_derivative(anti)
        if anti in f_symbols and fld in g_symbols:
            result = result - F.right_derivative(anti) * G.left_derivative(fld)
    return result.scale(BRACKET_SIGN)


def _master_square(S, reg):
    """{S,S} for even S, using {S,S} = 2 Σ ∂ᵣS/∂φ ∂ₗS/∂φ*"""
    symbols = S.symbols
    result = SuperPolynomial.zero()
    for fld, anti in reg.pairs:
        if fld in symbols and anti in symbols:
            result = result + S.right_derivative(fld) * S.left_derivative(anti)
    return result.scale(2 * BRACKET_SIGN)


@timed
def check_cme(S, reg, check_id="antibracket.cme", inputs=None):
    """Classical master equation {S,S} = 0, residual returned on failure"""
    S = SuperPolynomial.lift(S)
    if S.ghost_degree != 0:
        raise NotDegreeZeroError(f"action must have ghost degree 0, got {S.ghost_degree}")
    reg.check_registered(S)
    square = _master_square(S, reg)
    logger.debug("{S,S} has %d terms for S with %d terms", len(square), len(S))
    return VerificationReport.from_residuals(check_id, {"{S,S}": square}, inputs)


def brst(S, g, reg):
    """BRST differential d_S g = {S, g}"""
    return antibracket(S, g, reg)


@timed
def check_nilpotency(S, reg, generators=None, check_id="antibracket.nilpotency", inputs=None):
    """d_S(d_S g) = 0 for each listed generator (all registry generators by default)"""
    S = SuperPolynomial.lift(S)
    generators = reg.generators if generators is None else tuple(generators)
    residuals = {}
    for sym in generators:
        g = SuperPolynomial.lift(sym)
        label = sym.name if isinstance(sym, FieldSymbol) else g.to_text()
        residuals[f"d^2({label})"] = brst(S, brst(S, g, reg), reg)
    return VerificationReport.from_residuals(check_id, residuals, inputs)


@timed
def check_bracket_stability(S_total, S_tilde, reg, generators, check_id="antibracket.stability", inputs=None):
    """{S_tot, g} = {S̃, g} on the given generators"""
    residuals = {}
    for sym in generators:
        g = SuperPolynomial.lift(sym)
        residuals[f"{{S_tot,{sym.name}}}-{{S~,{sym.name}}}"] = brst(S_total, g, reg) - brst(S_tilde, g, reg)
    return VerificationReport.from_residuals(check_id, residuals, inputs)
