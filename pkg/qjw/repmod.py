"""Weight-graded bases and generator actions for V_k, M(mu+c) and their tensor chains.

A basis vector is an index tuple with one entry per factor, head first. The
action on a chain is the iterated coproduct

    K -> K (x) K,   E -> E (x) K + 1 (x) E,   F -> F (x) 1 + K^-1 (x) F

expanded either left-nested ((A (x) B) (x) C) or right-nested (A (x) (B (x) C)).
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal, NamedTuple

from qjw.errors import ShapeMismatchError
from qjw.middleware import Claim, run_claims
from qjw.models import Counterexample, ModuleShape, VerificationReport
from qjw.scalar import Coefficient, Scalar, coefficient_to_json, quantum_bracket

logger = logging.getLogger(__name__)

BasisIndex = tuple[int, ...]
Generator = Literal["K", "E", "F"]
Nesting = Literal["left", "right"]

GENERATORS: tuple[Generator, ...] = ("K", "E", "F")


class Weight(NamedTuple):
    """K-eigenvalue q^a t^b."""

    a: int
    b: int

    def scalar(self) -> Scalar:
        return Scalar.monomial(q=self.a, t=self.b)


class Factor(NamedTuple):
    verma: bool
    weight: int  # shift c for M(mu+c), k for V_k


@dataclass
class LinComb:
    """Finite linear combination of basis vectors of a fixed shape; zeros are never stored."""

    shape: ModuleShape
    terms: dict[BasisIndex, Coefficient] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: v for k, v in self.terms.items() if v}

    @classmethod
    def basis(cls, shape: ModuleShape, index: BasisIndex, coeff: Coefficient | None = None) -> LinComb:
        return cls(shape, {tuple(index): Scalar.one() if coeff is None else coeff})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[BasisIndex, Coefficient]]:
        return iter(sorted(self.terms.items()))

    def _check_shape(self, other: LinComb) -> None:
        if other.shape != self.shape:
            raise ShapeMismatchError(f"cannot combine vectors of {self.shape} and {other.shape}")

    def __add__(self, other: LinComb) -> LinComb:
        self._check_shape(other)
        terms = dict(self.terms)
        for index, coeff in other.terms.items():
            terms[index] = terms[index] + coeff if index in terms else coeff
        return LinComb(self.shape, terms)

    def __sub__(self, other: LinComb) -> LinComb:
        return self + other.scale(-1)

    def scale(self, factor: Coefficient | int) -> LinComb:
        return LinComb(self.shape, {k: v * factor for k, v in self.terms.items()})

    def coefficient(self, index: BasisIndex) -> Coefficient | None:
        return self.terms.get(tuple(index))

    def to_json(self) -> list[list]:
        return [[list(index), coefficient_to_json(coeff)] for index, coeff in self]


def level_of(v: BasisIndex) -> int:
    return sum(v)


def _factors(shape: ModuleShape) -> tuple[Factor, ...]:
    head = (Factor(True, shape.verma_shift),) if shape.has_head else ()
    return head + tuple(Factor(False, k) for k in shape.tail)


def is_valid(shape: ModuleShape, v: BasisIndex) -> bool:
    if len(v) != shape.width or any(i < 0 for i in v):
        return False
    return all(f.verma or i <= f.weight for f, i in zip(_factors(shape), v, strict=True))


@lru_cache(maxsize=None)
def enumerate_basis(shape: ModuleShape, level: int) -> tuple[BasisIndex, ...]:
    """All basis indices of the given level, ascending lexicographic."""
    if level < 0:
        return ()
    ranges = [range(min(k, level) + 1) for k in shape.tail]
    found = []
    for bits in itertools.product(*ranges):
        rest = level - sum(bits)
        if shape.has_head:
            if rest >= 0:
                found.append((rest, *bits))
        elif rest == 0:
            found.append(bits)
    return tuple(sorted(found))


def weight_of(shape: ModuleShape, v: BasisIndex) -> Weight:
    c = shape.verma_shift or 0
    return Weight(c + sum(shape.tail) - 2 * level_of(v), 1 if shape.has_head else 0)


def factor_action(factor: Factor, x: str, i: int) -> list[tuple[int, Scalar]]:
    t_exp = 1 if factor.verma else 0
    match x:
        case "K":
            return [(i, Scalar.monomial(q=factor.weight - 2 * i, t=t_exp))]
        case "Kinv":
            return [(i, Scalar.monomial(q=2 * i - factor.weight, t=-t_exp))]
        case "E":
            return [(i - 1, quantum_bracket(0, 0, i))] if i > 0 else []
        case "F":
            if factor.verma:
                return [(i + 1, quantum_bracket(1, 0, factor.weight - i))]
            return [(i + 1, quantum_bracket(0, 0, factor.weight - i))] if i < factor.weight else []
    raise ValueError(f"Unknown generator '{x}'")


def _tensor(
    left: dict[BasisIndex, Scalar], right: dict[BasisIndex, Scalar], into: dict[BasisIndex, Scalar]
) -> None:
    for a, ca in left.items():
        for b, cb in right.items():
            key = a + b
            into[key] = into[key] + ca * cb if key in into else ca * cb


@lru_cache(maxsize=None)
def _act(factors: tuple[Factor, ...], x: str, v: BasisIndex, nesting: Nesting) -> dict[BasisIndex, Scalar]:
    if not factors:
        return {(): Scalar.one()} if x in ("K", "Kinv") else {}
    if len(factors) == 1:
        return {(j,): c for j, c in factor_action(factors[0], x, v[0])}

    cut = len(factors) - 1 if nesting == "left" else 1
    fa, fb = factors[:cut], factors[cut:]
    va, vb = v[:cut], v[cut:]
    result: dict[BasisIndex, Scalar] = {}
    match x:
        case "K" | "Kinv":
            _tensor(_act(fa, x, va, nesting), _act(fb, x, vb, nesting), result)
        case "E":
            _tensor(_act(fa, "E", va, nesting), _act(fb, "K", vb, nesting), result)
            _tensor({va: Scalar.one()}, _act(fb, "E", vb, nesting), result)
        case "F":
            _tensor(_act(fa, "F", va, nesting), {vb: Scalar.one()}, result)
            _tensor(_act(fa, "Kinv", va, nesting), _act(fb, "F", vb, nesting), result)
        case _:
            raise ValueError(f"Unknown generator '{x}'")
    return {k: c for k, c in result.items() if c}


def act_generator(shape: ModuleShape, x: Generator, v: BasisIndex, nesting: Nesting = "left") -> LinComb:
    """Action of K, E or F on one basis vector through the coproduct."""
    if x not in GENERATORS:
        raise ValueError(f"Unknown generator '{x}'")
    if not is_valid(shape, v):
        raise ShapeMismatchError(f"{tuple(v)} is not a basis vector of {shape}")
    return LinComb(shape, dict(_act(_factors(shape), x, tuple(v), nesting)))


def act(x: Generator, comb: LinComb, nesting: Nesting = "left") -> LinComb:
    """Linear extension of ``act_generator`` to a combination."""
    result = LinComb(comb.shape)
    for index, coeff in comb.terms.items():
        result = result + act_generator(comb.shape, x, index, nesting).scale(coeff)
    return result


def _vectors(shape: ModuleShape, depth: int) -> Iterable[tuple[int, BasisIndex]]:
    for level in range(depth + 1):
        for v in enumerate_basis(shape, level):
            yield level, v


def _first_residual(shape: ModuleShape, depth: int, residual_of) -> Counterexample | None:
    for level, v in _vectors(shape, depth):
        residual = residual_of(v)
        if residual:
            return Counterexample(level=level, basis=list(v), residual=residual.to_json())
    return None


def relation_claims(shape: ModuleShape, depth: int) -> list[Claim]:
    """KE = q^2 EK, KF = q^-2 FK and EF - FE = (K - K^-1)/(q - q^-1) on every vector up to ``depth``."""
    q2, qm2 = Scalar.monomial(q=2), Scalar.monomial(q=-2)
    qdiff = Scalar.monomial(q=1) - Scalar.monomial(q=-1)

    def ke(v):
        return act("K", act_generator(shape, "E", v)) - act("E", act_generator(shape, "K", v)).scale(q2)

    def kf(v):
        return act("K", act_generator(shape, "F", v)) - act("F", act_generator(shape, "K", v)).scale(qm2)

    def commutator(v):
        lhs = act("E", act_generator(shape, "F", v)) - act("F", act_generator(shape, "E", v))
        k = weight_of(shape, v).scalar()
        return lhs - LinComb.basis(shape, v, (k - k.inverse()) / qdiff)

    return [
        Claim(f"relation[KE=q^2EK]@{shape}", depth, lambda: _first_residual(shape, depth, ke)),
        Claim(f"relation[KF=q^-2FK]@{shape}", depth, lambda: _first_residual(shape, depth, kf)),
        Claim(f"relation[EF-FE]@{shape}", depth, lambda: _first_residual(shape, depth, commutator)),
    ]


def coassociativity_claims(shape: ModuleShape, depth: int) -> list[Claim]:
    def check(x: Generator):
        return lambda: _first_residual(
            shape, depth, lambda v: act_generator(shape, x, v, "left") - act_generator(shape, x, v, "right")
        )

    return [Claim(f"coassociativity[{x}]@{shape}", depth, check(x)) for x in GENERATORS]


def check_relations(shape: ModuleShape, depth: int, *, threads: int | None = None) -> list[VerificationReport]:
    return run_claims(relation_claims(shape, depth), threads=threads)


def check_coassociativity(shape: ModuleShape, depth: int, *, threads: int | None = None) -> list[VerificationReport]:
    return run_claims(coassociativity_claims(shape, depth), threads=threads)
