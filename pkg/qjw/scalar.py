"""Exact scalars in Q(q, t, s) with t = q^mu and s = q^i.

Scalars are immutable wrappers around elements of the sympy rational function
field ``QQ(q, t, s)``. Field arithmetic cancels common factors, so every value
is kept as a reduced fraction whose denominator has a positive leading
coefficient in lex order. Equality is still decided by cross-multiplication.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, NamedTuple

from sympy.polys.domains import QQ
from sympy.polys.fields import field
from sympy.polys.orderings import lex

from qjw.errors import SpecializationError

logger = logging.getLogger(__name__)

FIELD, _Q, _T, _S = field("q,t,s", QQ, lex)


def _to_fraction(coeff: Any) -> Fraction:
    return Fraction(int(coeff.numerator), int(coeff.denominator))


def _to_domain(value: int | Fraction) -> Any:
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def format_fraction(value: Fraction) -> str:
    """Render a rational as ``"p/r"`` with r > 0."""
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str | int | Fraction) -> Fraction:
    if isinstance(text, Fraction | int):
        return Fraction(text)
    return Fraction(str(text).strip())


class Monomial(NamedTuple):
    """Exponent triple of q^a t^b s^c; negative exponents are allowed."""

    q: int = 0
    t: int = 0
    s: int = 0


class LaurentPoly:
    """Finite map Monomial -> Fraction with no stored zeros, kept in lex order."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[Monomial, Fraction] | Iterable[tuple[Monomial, Fraction]] = ()):
        items = terms.items() if isinstance(terms, dict) else terms
        merged: dict[Monomial, Fraction] = {}
        for monom, coeff in items:
            key = Monomial(*monom)
            merged[key] = merged.get(key, Fraction(0)) + Fraction(coeff)
        self._terms = tuple(sorted((m, c) for m, c in merged.items() if c))

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPoly) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    def __repr__(self) -> str:
        return f"LaurentPoly({dict(self._terms)!r})"

    def evaluate(self, q0: Fraction, t0: Fraction, s0: Fraction) -> Fraction:
        return sum((c * q0**m.q * t0**m.t * s0**m.s for m, c in self._terms), Fraction(0))

    def to_field(self) -> Any:
        value = FIELD.zero
        for m, c in self._terms:
            value += FIELD.ground_new(_to_domain(c)) * _Q**m.q * _T**m.t * _S**m.s
        return value

    def to_json(self) -> list[dict[str, Any]]:
        return [{"c": format_fraction(c), "q": m.q, "t": m.t, "s": m.s} for m, c in self._terms]

    @classmethod
    def from_json(cls, data: list[dict[str, Any]]) -> LaurentPoly:
        return cls((Monomial(int(t["q"]), int(t["t"]), int(t["s"])), parse_fraction(t["c"])) for t in data)

    @classmethod
    def from_poly(cls, poly: Any) -> LaurentPoly:
        return cls((Monomial(*monom), _to_fraction(coeff)) for monom, coeff in poly.terms())


class Scalar:
    """Element of Q(q, t, s).

    >>> quantum_bracket(0, 0, 2) == Scalar.monomial(q=1) + Scalar.monomial(q=-1)
    True
    """

    __slots__ = ("_value",)

    def __init__(self, value: Any = None):
        if value is None:
            value = FIELD.zero
        elif isinstance(value, int | Fraction):
            value = FIELD.ground_new(_to_domain(value))
        self._value = value

    # constructors

    @classmethod
    def zero(cls) -> Scalar:
        return _ZERO

    @classmethod
    def one(cls) -> Scalar:
        return _ONE

    @classmethod
    def monomial(cls, q: int = 0, t: int = 0, s: int = 0, coeff: int | Fraction = 1) -> Scalar:
        return cls(FIELD.ground_new(_to_domain(coeff)) * _Q**q * _T**t * _S**s)

    @classmethod
    def from_parts(cls, num: LaurentPoly, den: LaurentPoly) -> Scalar:
        if not den:
            raise ZeroDivisionError("Scalar denominator is zero")
        return cls(num.to_field() / den.to_field())

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> Scalar:
        return cls.from_parts(LaurentPoly.from_json(data["num"]), LaurentPoly.from_json(data["den"]))

    @classmethod
    def coerce(cls, value: Scalar | int | Fraction) -> Scalar:
        return value if isinstance(value, Scalar) else cls(value)

    # canonical parts

    @property
    def num(self) -> LaurentPoly:
        return LaurentPoly.from_poly(self._value.numer)

    @property
    def den(self) -> LaurentPoly:
        return LaurentPoly.from_poly(self._value.denom)

    def to_json(self) -> dict[str, Any]:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    # arithmetic

    def __add__(self, other: Scalar | int | Fraction) -> Scalar:
        if isinstance(other, Fraction | int):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return Scalar(self._value + other._value)

    __radd__ = __add__

    def __sub__(self, other: Scalar | int | Fraction) -> Scalar:
        if isinstance(other, Fraction | int):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return Scalar(self._value - other._value)

    def __rsub__(self, other: int | Fraction) -> Scalar:
        return Scalar(other) - self

    def __mul__(self, other: Scalar | int | Fraction) -> Scalar:
        if isinstance(other, Fraction | int):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return Scalar(self._value * other._value)

    __rmul__ = __mul__

    def __neg__(self) -> Scalar:
        return Scalar(-self._value)

    def inverse(self) -> Scalar:
        if not self._value:
            raise ZeroDivisionError("inverse of the zero Scalar")
        return Scalar(FIELD.one / self._value)

    def __truediv__(self, other: Scalar | int | Fraction) -> Scalar:
        return self * Scalar.coerce(other).inverse()

    def __rtruediv__(self, other: int | Fraction) -> Scalar:
        return Scalar(other) * self.inverse()

    def __pow__(self, exponent: int) -> Scalar:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return Scalar(self._value**exponent)

    # comparison

    def __bool__(self) -> bool:
        return bool(self._value.numer)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int | Fraction):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        a, b = self._value, other._value
        return a.numer * b.denom == b.numer * a.denom

    def __hash__(self) -> int:
        a = self._value
        if a.numer.is_ground and a.denom.is_ground:
            return hash(_to_fraction(a.numer.LC) / _to_fraction(a.denom.LC))
        return hash(a)

    def __repr__(self) -> str:
        return f"Scalar({self._value})"

    def __str__(self) -> str:
        return str(self._value)

    # substitutions

    def substitute_index(self, i0: int) -> Scalar:
        """Replace s = q^i by q^{i0}."""

        def fold(poly: LaurentPoly) -> LaurentPoly:
            return LaurentPoly((Monomial(m.q + i0 * m.s, m.t, 0), c) for m, c in poly)

        return Scalar.from_parts(fold(self.num), fold(self.den))

    def depends_on_index(self) -> bool:
        return any(m.s for m, _ in self.num) or any(m.s for m, _ in self.den)


_ZERO = Scalar(FIELD.zero)
_ONE = Scalar(FIELD.one)

Coefficient = Scalar | Fraction


def scalar_arith(op: str, a: Scalar, b: Scalar | None = None) -> Scalar:
    match op:
        case "add":
            return a + b
        case "sub":
            return a - b
        case "mul":
            return a * b
        case "neg":
            return -a
    raise ValueError(f"Unknown scalar operation '{op}'")


def scalar_inv(a: Scalar) -> Scalar:
    return a.inverse()


@lru_cache(maxsize=4096)
def quantum_bracket(eps_mu: int, eps_i: int, k: int) -> Scalar:
    """The quantum integer [eps_mu*mu + eps_i*i + k]."""
    if eps_mu not in (0, 1) or eps_i not in (-1, 0, 1):
        raise ValueError(f"bracket signs out of range: eps_mu={eps_mu}, eps_i={eps_i}")
    top = Scalar.monomial(q=k, t=eps_mu, s=eps_i) - Scalar.monomial(q=-k, t=-eps_mu, s=-eps_i)
    return top / (Scalar.monomial(q=1) - Scalar.monomial(q=-1))


def specialize(a: Scalar, q0: Fraction, mu0: int, i0: int = 0) -> Fraction:
    """Evaluate at q = q0, t = q0^mu0, s = q0^i0."""
    q0 = Fraction(q0)
    if q0 in (0, 1, -1):
        raise SpecializationError(f"q0={format_fraction(q0)} is not a valid point: q0 must avoid 0, 1 and -1")
    try:
        t0, s0 = q0**mu0, q0**i0
        den = a.den.evaluate(q0, t0, s0)
        num = a.num.evaluate(q0, t0, s0)
    except ZeroDivisionError as e:
        raise SpecializationError(f"q0={format_fraction(q0)} is not a valid point: {e}") from e
    if den == 0:
        raise SpecializationError(f"denominator of {a} vanishes at q0={format_fraction(q0)}, mu0={mu0}, i0={i0}")
    return num / den


def coefficient_to_json(value: Coefficient) -> dict[str, Any] | str:
    if isinstance(value, Scalar):
        return value.to_json()
    return format_fraction(Fraction(value))


class Mutation(enum.StrEnum):
    """Deliberate defects used to check that the verifiers can fail."""

    NONE = "none"
    JW_SIGN_FLIP = "jw_sign_flip"
    DROP_EJW_NORMALIZER = "drop_ejw_normalizer"
    PERTURB_F_COEFFICIENT = "perturb_f_coefficient"


@dataclass(frozen=True)
class Regime:
    """Where matrix coefficients live: symbolic Q(q, t) or exact rationals at (q0, mu0)."""

    q0: Fraction | None = None
    mu0: int | None = None
    mutation: Mutation = Mutation.NONE

    @property
    def symbolic(self) -> bool:
        return self.q0 is None

    @property
    def zero(self) -> Coefficient:
        return Scalar.zero() if self.symbolic else Fraction(0)

    @property
    def one(self) -> Coefficient:
        return Scalar.one() if self.symbolic else Fraction(1)

    def lift(self, value: Scalar) -> Coefficient:
        if self.symbolic:
            return value
        return specialize(value, self.q0, self.mu0 or 0, 0)

    def describe(self) -> str:
        point = "symbolic" if self.symbolic else f"q0={format_fraction(self.q0)}, mu0={self.mu0}"
        return point if self.mutation is Mutation.NONE else f"{point}, mutation={self.mutation.value}"


SYMBOLIC = Regime()
