"""Super-polynomials with exact coefficients."""

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property

logger = logging.getLogger(__name__)

MIXED = "mixed"

# ===================================================================
# ERRORS
# ===================================================================

class SuperAlgebraError(ValueError):
    """Base error for the super-polynomial engine"""


class RegistryMismatchError(SuperAlgebraError):
    """Two different generators share one name"""


class SubstitutionError(SuperAlgebraError):
    """Substituted image does not match the degree of its symbol"""


class DegreeError(SuperAlgebraError):
    """Degree or parity requested of a heterogeneous element"""


# ===================================================================
# GENERATORS
# ===================================================================

class FieldKind(Enum):
    GAUGE = "gauge"
    GHOST = "ghost"
    AUXILIARY = "auxiliary"
    ANTIFIELD = "antifield"


_BLOCK_RANK = {
    FieldKind.GAUGE: 0,
    FieldKind.AUXILIARY: 100,
    FieldKind.ANTIFIELD: 200,
}


def _natural_key(name):
    """Natural sort key, C2 before C10"""
    return tuple(int(part) if part.isdigit() else part for part in re.findall(r"\d+|\D+", name))


@dataclass(frozen=True)
class FieldSymbol:
    """A graded generator"""
    name: str
    ghost_degree: int
    kind: FieldKind = FieldKind.GAUGE
    sort_key: tuple = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.name:
            raise SuperAlgebraError("generator name must not be empty")
        # ghosts of degree d sit between gauge fields and auxiliary fields
        rank = self.ghost_degree if self.kind is FieldKind.GHOST else _BLOCK_RANK[self.kind]
        object.__setattr__(self, "sort_key", (rank, _natural_key(self.name)))
        object.__setattr__(self, "_hash", hash((self.name, self.ghost_degree, self.kind)))

    def __hash__(self):
        return self._hash

    @property
    def parity(self):
        return self.ghost_degree % 2

    @property
    def is_odd(self):
        return self.ghost_degree % 2 == 1

    def __str__(self):
        return self.name


# ===================================================================
# COEFFICIENTS
# ===================================================================

@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number re + im*i with rational parts"""
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value):
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        if isinstance(value, complex):
            raise TypeError("floating point coefficients are not supported")
        if isinstance(value, str):
            return cls(Fraction(value))
        raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")

    @property
    def is_zero(self):
        return self.re == 0 and self.im == 0

    @property
    def is_real(self):
        return self.im == 0

    def __bool__(self):
        return not self.is_zero

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * GaussianRational(other.re / norm, -other.im / norm)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def to_text(self):
        """Text form accepted by the parser"""
        if self.im == 0:
            return _fraction_text(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{_fraction_text(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        imag = "i" if abs(self.im) == 1 else f"{_fraction_text(abs(self.im))}*i"
        return f"({_fraction_text(self.re)}{sign}{imag})"

    def __str__(self):
        return self.to_text()


I = GaussianRational(0, 1)
ONE = GaussianRational(1)
ZERO = GaussianRational(0)


def _fraction_text(value):
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ===================================================================
# MONOMIALS
# ===================================================================

@dataclass(frozen=True)
class Monomial:
    """Even part times a normal-ordered odd part"""
    even_part: tuple = ()
    odd_part: tuple = ()
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.even_part, self.odd_part)))

    def __hash__(self):
        return self._hash

    @cached_property
    def ghost_degree(self):
        return (sum(sym.ghost_degree * exp for sym, exp in self.even_part)
                + sum(sym.ghost_degree for sym in self.odd_part))

    @cached_property
    def symbols(self):
        return frozenset(sym for sym, _ in self.even_part) | frozenset(self.odd_part)

    @property
    def is_constant(self):
        return not self.even_part and not self.odd_part

    def exponent(self, symbol):
        for sym, exp in self.even_part:
            if sym == symbol:
                return exp
        return 0

    def sort_key(self):
        return (
            sum(exp for _, exp in self.even_part) + len(self.odd_part),
            tuple((sym.sort_key, exp) for sym, exp in self.even_part),
            tuple(sym.sort_key for sym in self.odd_part),
        )

    def to_text(self):
        factors = []
        for sym, exp in self.even_part:
            factors.append(sym.name if exp == 1 else f"{sym.name}^{exp}")
        factors.extend(sym.name for sym in self.odd_part)
        return " * ".join(factors)


UNIT_MONOMIAL = Monomial()


def _check_same_symbol(left, right):
    if left.sort_key == right.sort_key and left != right:
        raise RegistryMismatchError(
            f"generator '{left.name}' is defined twice (degrees {left.ghost_degree} and {right.ghost_degree})"
        )


def _merge_even(left, right):
    if not left:
        return right
    if not right:
        return left
    merged = dict(left)
    for sym, exp in right:
        if sym in merged:
            merged[sym] += exp
        else:
            for other in merged:
                _check_same_symbol(other, sym)
            merged[sym] = exp
    return tuple(sorted(merged.items(), key=lambda item: item[0].sort_key))


def _merge_odd(left, right):
    """Sign 0 on a repeated odd generator"""
    if not right:
        return 1, left
    if not left:
        return 1, right
    merged = []
    sign = 1
    i = j = 0
    while i < len(left) and j < len(right):
        x, y = left[i], right[j]
        if x is y or x == y:
            return 0, ()
        _check_same_symbol(x, y)
        if x.sort_key < y.sort_key:
            merged.append(x)
            i += 1
        else:
            merged.append(y)
            j += 1
            # y moves past every remaining odd factor of the left monomial
            if (len(left) - i) % 2:
                sign = -sign
    merged.extend(left[i:])
    merged.extend(right[j:])
    return sign, tuple(merged)


def _accumulate(terms, mono, coeff):
    total = terms.get(mono)
    total = coeff if total is None else total + coeff
    if total.is_zero:
        terms.pop(mono, None)
    else:
        terms[mono] = total


def multiply_monomials(left, right):
    """Normal-ordered product of two monomials as (sign, monomial)"""
    sign, odd = _merge_odd(left.odd_part, right.odd_part)
    if sign == 0:
        return 0, None
    return sign, Monomial(_merge_even(left.even_part, right.even_part), odd)


# ===================================================================
# SUPER-POLYNOMIALS
# ===================================================================

class SuperPolynomial:
    """Canonical sparse polynomial in even and odd generators"""

    def __init__(self, terms=None):
        clean = {}
        for mono, coeff in (terms or {}).items():
            coeff = GaussianRational.coerce(coeff)
            if not coeff.is_zero:
                clean[mono] = coeff
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        poly = cls.__new__(cls)
        poly._terms = terms
        poly._hash = None
        return poly

    # ---------------------------------------------------------------
    # construction
    # ---------------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls._raw({})

    @classmethod
    def constant(cls, value):
        return cls({UNIT_MONOMIAL: value})

    @classmethod
    def generator(cls, symbol):
        if symbol.is_odd:
            return cls._raw({Monomial((), (symbol,)): ONE})
        return cls._raw({Monomial(((symbol, 1),), ()): ONE})

    @classmethod
    def lift(cls, value):
        if isinstance(value, SuperPolynomial):
            return value
        if isinstance(value, FieldSymbol):
            return cls.generator(value)
        return cls.constant(value)

    # ---------------------------------------------------------------
    # inspection
    # ---------------------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    @property
    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @property
    def is_constant(self):
        return all(mono.is_constant for mono in self._terms)

    def constant_value(self):
        if not self.is_constant:
            raise DegreeError(f"{self.to_text()} is not a constant")
        return self._terms.get(UNIT_MONOMIAL, ZERO)

    @cached_property
    def symbols(self):
        result = frozenset()
        for mono in self._terms:
            result |= mono.symbols
        return result

    def contains_kind(self, kind):
        return any(sym.kind is kind for sym in self.symbols)

    @property
    def ghost_degree(self):
        """Common ghost degree of all terms, or MIXED"""
        degrees = {mono.ghost_degree for mono in self._terms}
        if not degrees:
            return 0
        if len(degrees) > 1:
            return MIXED
        return degrees.pop()

    @property
    def is_homogeneous(self):
        return self.ghost_degree != MIXED

    @property
    def parity(self):
        parities = {mono.ghost_degree % 2 for mono in self._terms}
        if len(parities) > 1:
            raise DegreeError(f"{self.to_text()} has no definite parity")
        return parities.pop() if parities else 0

    @property
    def is_real(self):
        return all(coeff.is_real for coeff in self._terms.values())

    def coefficient(self, monomial):
        return self._terms.get(monomial, ZERO)

    # ---------------------------------------------------------------
    # arithmetic
    # ---------------------------------------------------------------

    def __add__(self, other):
        other = SuperPolynomial.lift(other)
        result = dict(self._terms)
        for mono, coeff in other._terms.items():
            _accumulate(result, mono, coeff)
        return SuperPolynomial._raw(result)

    __radd__ = __add__

    def __neg__(self):
        return SuperPolynomial._raw({mono: -coeff for mono, coeff in self._terms.items()})

    def __sub__(self, other):
        return self + (-SuperPolynomial.lift(other))

    def __rsub__(self, other):
        return SuperPolynomial.lift(other) - self

    def scale(self, scalar):
        scalar = GaussianRational.coerce(scalar)
        if scalar.is_zero:
            return SuperPolynomial.zero()
        return SuperPolynomial._raw({mono: coeff * scalar for mono, coeff in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        other = SuperPolynomial.lift(other)
        result = {}
        for left, a in self._terms.items():
            for right, b in other._terms.items():
                sign, mono = multiply_monomials(left, right)
                if sign == 0:
                    continue
                coeff = a * b if sign > 0 else -(a * b)
                _accumulate(result, mono, coeff)
        return SuperPolynomial._raw(result)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        return SuperPolynomial.lift(other) * self

    def __truediv__(self, scalar):
        return self.scale(ONE / GaussianRational.coerce(scalar))

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise SuperAlgebraError("only non-negative integer powers are supported")
        result = SuperPolynomial.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, FieldSymbol)):
            other = SuperPolynomial.lift(other)
        if not isinstance(other, SuperPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # ---------------------------------------------------------------
    # graded calculus
    # ---------------------------------------------------------------

    def left_derivative(self, symbol):
        return self._derivative(symbol, from_left=True)

    def right_derivative(self, symbol):
        return self._derivative(symbol, from_left=False)

    def _derivative(self, symbol, from_left):
        result = {}
        if symbol not in self.symbols:
            return SuperPolynomial.zero()
        for mono, coeff in self._terms.items():
            if symbol.is_odd:
                if symbol not in mono.odd_part:
                    continue
                idx = mono.odd_part.index(symbol)
                n = len(mono.odd_part)
                steps = idx if from_left else n - 1 - idx
                reduced = Monomial(mono.even_part, mono.odd_part[:idx] + mono.odd_part[idx + 1:])
                value = coeff if steps % 2 == 0 else -coeff
            else:
                exp = mono.exponent(symbol)
                if exp == 0:
                    continue
                even = tuple(
                    (sym, e - 1 if sym == symbol else e)
                    for sym, e in mono.even_part
                    if not (sym == symbol and e == 1)
                )
                reduced = Monomial(even, mono.odd_part)
                value = coeff * exp
            _accumulate(result, reduced, value)
        return SuperPolynomial._raw(result)

    def conjugate(self):
        """Conjugate the coefficients"""
        return SuperPolynomial._raw({mono: coeff.conjugate() for mono, coeff in self._terms.items()})

    def substitute(self, mapping):
        """Simultaneous substitution of generators by super-polynomials"""
        images = {}
        for sym, image in mapping.items():
            image = SuperPolynomial.lift(image)
            if not image.is_zero:
                degree = image.ghost_degree
                if degree == MIXED or degree != sym.ghost_degree:
                    raise SubstitutionError(
                        f"cannot replace {sym.name} (degree {sym.ghost_degree}) by "
                        f"{image.to_text()} (degree {degree})"
                    )
            images[sym] = image
        if not images:
            return self

        powers = {}

        def power(sym, exp):
            key = (sym, exp)
            if key not in powers:
                powers[key] = images[sym] ** exp
            return powers[key]

        result = {}
        for mono, coeff in self._terms.items():
            if mono.symbols.isdisjoint(images):
                _accumulate(result, mono, coeff)
                continue
            term = SuperPolynomial.constant(coeff)
            for sym, exp in mono.even_part:
                if sym in images:
                    term = term * power(sym, exp)
                else:
                    term = term * SuperPolynomial._raw({Monomial(((sym, exp),), ()): ONE})
                if term.is_zero:
                    break
            else:
                for sym in mono.odd_part:
                    term = term * (images[sym] if sym in images else SuperPolynomial.generator(sym))
                    if term.is_zero:
                        break
            for key, value in term.items():
                _accumulate(result, key, value)
        return SuperPolynomial._raw(result)

    def set_to_zero(self, symbols):
        return self.substitute({sym: SuperPolynomial.zero() for sym in symbols})

    def restrict_to(self, keep):
        """Set every generator outside `keep` to zero"""
        keep = set(keep)
        return self.set_to_zero([sym for sym in self.symbols if sym not in keep])

    # ---------------------------------------------------------------
    # text
    # ---------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key())

    def to_text(self):
        """Render in the expression grammar; parse(to_text(p)) == p"""
        if not self._terms:
            return "0"
        pieces = []
        for mono, coeff in self.sorted_terms():
            negative = (coeff.im == 0 and coeff.re < 0) or (coeff.re == 0 and coeff.im < 0)
            magnitude = -coeff if negative else coeff
            body = mono.to_text()
            if not body:
                text = magnitude.to_text()
            elif magnitude == 1:
                text = body
            else:
                text = f"{magnitude.to_text()} * {body}"
            if not pieces:
                pieces.append(f"-{text}" if negative else text)
            else:
                pieces.append(f"- {text}" if negative else f"+ {text}")
        return " ".join(pieces)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"SuperPolynomial({self.to_text()!r})"


# ===================================================================
# FUNCTIONAL API
# ===================================================================

def multiply(a, b):
    return SuperPolynomial.lift(a) * SuperPolynomial.lift(b)


def left_derivative(p, symbol):
    return SuperPolynomial.lift(p).left_derivative(symbol)


def right_derivative(p, symbol):
    return SuperPolynomial.lift(p).right_derivative(symbol)


def conjugate(p):
    return SuperPolynomial.lift(p).conjugate()


def substitute(p, mapping):
    return SuperPolynomial.lift(p).substitute(mapping)


def supercommutator(a, b):
    """Graded commutator"""
    sign = -1 if (a.parity and b.parity) else 1
    return a * b - (b * a).scale(sign)


def symbol_table(symbols):
    """Name to symbol map"""
    table = {}
    for sym in symbols:
        existing = table.get(sym.name)
        if existing is not None and existing != sym:
            raise RegistryMismatchError(f"generator '{sym.name}' is defined twice")
        table[sym.name] = sym
    return table
