"""Generic-index proofs of the intertwiner and lemma computations.

A Verma index is written i + d with i symbolic: coefficients live in Q(q, t, s)
with s = q^i, so [i + d] = quantum_bracket(0, 1, d) and
[mu + c - i - d] = quantum_bracket(1, -1, c - d). Distinct formal vectors are
treated as linearly independent; small indices are covered separately by
comparing against the concrete engine after substituting s = q^{i0}.

Counterexamples from this module report ``basis = [d, *bits]`` (the offset of
the starting vector from v_i) and ``level = d + sum(bits)``.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

from qjw.errors import IndexRangeError, ShapeMismatchError
from qjw.maps import BlockedMap
from qjw.middleware import Claim, run_claims
from qjw.models import Counterexample, ModuleShape, VerificationReport
from qjw.operators import E_mu_map, F_mu_map, coev_map, ev_map, pad
from qjw.repmod import GENERATORS, Factor, Generator, LinComb, act, factor_action
from qjw.scalar import Mutation, Regime, Scalar, coefficient_to_json, quantum_bracket

logger = logging.getLogger(__name__)

StepKind = Literal["act", "E_mu", "F_mu", "ev_pad", "coev_pad"]
Target = Literal["E_mu", "F_mu"]

TARGETS: tuple[Target, ...] = ("E_mu", "F_mu")
DEFAULT_AGREEMENT_INDICES = (0, 1, 2, 3, 4, 5, 6, 7, 8)

_BIT = Factor(False, 1)


class FormalVector(NamedTuple):
    """v_{i+d} (x) v_{bits} in a Verma-headed chain."""

    d: int
    bits: tuple[int, ...] = ()


@dataclass
class FormalLinComb:
    shape: ModuleShape
    terms: dict[FormalVector, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        if not self.shape.has_head:
            raise ShapeMismatchError(f"formal vectors need a Verma head, got {self.shape}")
        self.terms = {k: v for k, v in self.terms.items() if v}

    @classmethod
    def generic(cls, shape: ModuleShape, d: int = 0, bits: tuple[int, ...] = ()) -> FormalLinComb:
        return cls(shape, {FormalVector(d, tuple(bits)): Scalar.one()})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[FormalVector, Scalar]]:
        return iter(sorted(self.terms.items()))

    def __add__(self, other: FormalLinComb) -> FormalLinComb:
        if other.shape != self.shape:
            raise ShapeMismatchError(f"cannot combine formal vectors of {self.shape} and {other.shape}")
        terms = dict(self.terms)
        for v, coeff in other.terms.items():
            terms[v] = terms[v] + coeff if v in terms else coeff
        return FormalLinComb(self.shape, terms)

    def __sub__(self, other: FormalLinComb) -> FormalLinComb:
        return self + other.scale(Scalar(-1))

    def scale(self, factor: Scalar) -> FormalLinComb:
        return FormalLinComb(self.shape, {v: c * factor for v, c in self.terms.items()})

    def to_json(self) -> list[list]:
        return [[[v.d, *v.bits], coefficient_to_json(c)] for v, c in self]

    def instantiate(self, i0: int) -> LinComb:
        """Substitute s = q^{i0}; terms whose coefficient vanishes there are dropped."""
        terms = {}
        for v, coeff in self.terms.items():
            value = coeff.substitute_index(i0)
            if not value:
                continue
            if i0 + v.d < 0:
                raise IndexRangeError(f"v_(i+{v.d}) has non-zero coefficient {value} at i = {i0}")
            terms[(i0 + v.d, *v.bits)] = value
        return LinComb(self.shape, terms)


def _head_action(c: int, x: str, d: int) -> list[tuple[int, Scalar]]:
    match x:
        case "K":
            return [(d, Scalar.monomial(q=c - 2 * d, t=1, s=-2))]
        case "Kinv":
            return [(d, Scalar.monomial(q=2 * d - c, t=-1, s=2))]
        case "E":
            return [(d - 1, quantum_bracket(0, 1, d))]
        case "F":
            return [(d + 1, quantum_bracket(1, -1, c - d))]
    raise ValueError(f"Unknown generator '{x}'")


def formal_act(x: Generator, shape: ModuleShape, v: FormalVector) -> FormalLinComb:
    """K, E or F on v_{i+d} (x) bits through the iterated coproduct.

    E acts on one factor with K on every later factor; F acts on one factor
    with K^-1 on every earlier factor.
    """
    if x not in GENERATORS:
        raise ValueError(f"Unknown generator '{x}'")
    c = shape.verma_shift
    slots = [v.d, *v.bits]

    def local(j: int, y: str) -> list[tuple[int, Scalar]]:
        return _head_action(c, y, slots[0]) if j == 0 else factor_action(_BIT, y, slots[j])

    def diagonal(j: int, y: str) -> Scalar:
        return local(j, y)[0][1]

    result = FormalLinComb(shape)
    if x == "K":
        coeff = Scalar.one()
        for j in range(len(slots)):
            coeff = coeff * diagonal(j, "K")
        return FormalLinComb(shape, {v: coeff})
    for j in range(len(slots)):
        others = range(j + 1, len(slots)) if x == "E" else range(j)
        partner = "K" if x == "E" else "Kinv"
        for new, coeff in local(j, x):
            for k in others:
                coeff = coeff * diagonal(k, partner)
            moved = [*slots]
            moved[j] = new
            result = result + FormalLinComb(shape, {FormalVector(moved[0], tuple(moved[1:])): coeff})
    return result


def formal_act_comb(x: Generator, comb: FormalLinComb) -> FormalLinComb:
    result = FormalLinComb(comb.shape)
    for v, coeff in comb.terms.items():
        result = result + formal_act(x, comb.shape, v).scale(coeff)
    return result


@dataclass(frozen=True)
class Step:
    """One map in a proof pipeline, applied to the vector produced so far."""

    kind: StepKind
    c: int = 0
    position: int = 0
    generator: Generator | None = None

    def __str__(self) -> str:
        match self.kind:
            case "act":
                return str(self.generator)
            case "E_mu" | "F_mu":
                return f"{self.kind[0]}[{self.c}]"
            case _:
                return f"{self.kind.removesuffix('_pad')}@{self.position}"


def _check(ok: bool, step: Step, shape: ModuleShape) -> None:
    if not ok:
        raise ShapeMismatchError(f"step {step} does not apply to {shape}")


def _formal_rule(
    step: Step, shape: ModuleShape, mutation: Mutation
) -> tuple[ModuleShape, Callable[[FormalVector], dict[FormalVector, Scalar]]]:
    c, tail = shape.verma_shift, shape.tail
    m = len(tail)
    match step.kind:
        case "E_mu":
            _check(c == step.c and m >= 1 and tail[0] == 1, step, shape)

            def rule(v: FormalVector) -> dict[FormalVector, Scalar]:
                bit, rest = v.bits[0], v.bits[1:]
                if bit:
                    return {FormalVector(v.d + 1, rest): Scalar.one()}
                return {FormalVector(v.d, rest): Scalar.monomial(q=v.d, s=1)}

            return ModuleShape(verma_shift=c + 1, tail=tail[1:]), rule
        case "F_mu":
            _check(c == step.c + 1, step, shape)
            offset = -step.c if mutation is Mutation.PERTURB_F_COEFFICIENT else -step.c - 1

            def rule(v: FormalVector) -> dict[FormalVector, Scalar]:
                return {
                    FormalVector(v.d, (0, *v.bits)): quantum_bracket(1, -1, step.c + 1 - v.d),
                    FormalVector(v.d - 1, (1, *v.bits)): Scalar.monomial(q=v.d + offset, t=-1, s=1)
                    * quantum_bracket(0, 1, v.d),
                }

            return ModuleShape(verma_shift=step.c, tail=(1, *tail)), rule
        case "ev_pad":
            p = step.position
            _check(0 <= p and p + 2 <= m and tail[p : p + 2] == (1, 1), step, shape)
            values = {(0, 1): -Scalar.monomial(q=1), (1, 0): Scalar.one()}

            def rule(v: FormalVector) -> dict[FormalVector, Scalar]:
                pair = v.bits[p : p + 2]
                if pair not in values:
                    return {}
                return {FormalVector(v.d, v.bits[:p] + v.bits[p + 2 :]): values[pair]}

            return ModuleShape(verma_shift=c, tail=tail[:p] + tail[p + 2 :]), rule
        case "coev_pad":
            p = step.position
            _check(0 <= p <= m, step, shape)

            def rule(v: FormalVector) -> dict[FormalVector, Scalar]:
                return {
                    FormalVector(v.d, v.bits[:p] + (0, 1) + v.bits[p:]): Scalar.one(),
                    FormalVector(v.d, v.bits[:p] + (1, 0) + v.bits[p:]): -Scalar.monomial(q=-1),
                }

            return ModuleShape(verma_shift=c, tail=tail[:p] + (1, 1) + tail[p:]), rule
    raise ValueError(f"Unknown step kind '{step.kind}'")


def formal_apply(step: Step, comb: FormalLinComb, mutation: Mutation = Mutation.NONE) -> FormalLinComb:
    """Linear extension of one defining formula with symbolic index."""
    if step.kind == "act":
        return formal_act_comb(step.generator, comb)
    target, rule = _formal_rule(step, comb.shape, mutation)
    result = FormalLinComb(target)
    for v, coeff in comb.terms.items():
        result = result + FormalLinComb(target, rule(v)).scale(coeff)
    return result


def run_formal(steps: Sequence[Step], start: FormalLinComb, mutation: Mutation = Mutation.NONE) -> FormalLinComb:
    comb = start
    for step in steps:
        comb = formal_apply(step, comb, mutation)
    return comb


def _concrete_map(step: Step, shape: ModuleShape, regime: Regime) -> BlockedMap:
    m = len(shape.tail)
    match step.kind:
        case "E_mu":
            return pad(E_mu_map(step.c, regime), right=m - 1)
        case "F_mu":
            return pad(F_mu_map(step.c, regime), right=m)
        case "ev_pad":
            return pad(ev_map(regime), head=shape.verma_shift, left=step.position, right=m - step.position - 2)
        case "coev_pad":
            return pad(coev_map(regime), head=shape.verma_shift, left=step.position, right=m - step.position)
    raise ValueError(f"Unknown step kind '{step.kind}'")


def run_concrete(steps: Sequence[Step], start: LinComb, mutation: Mutation = Mutation.NONE) -> LinComb:
    """The same pipeline through ``repmod`` and the operator maps at a concrete index."""
    regime = Regime(mutation=mutation)
    comb = start
    for step in steps:
        if step.kind == "act":
            comb = act(step.generator, comb)
        else:
            comb = _concrete_map(step, comb.shape, regime).apply(comb)
    return comb


@dataclass(frozen=True)
class Identity:
    """lhs(v) - rhs(v) - scalar * v = 0 on the generic vector v of ``shape``."""

    name: str
    shape: ModuleShape
    start: FormalVector
    lhs: tuple[Step, ...]
    rhs: tuple[Step, ...] | None = None
    scalar: Scalar | None = None

    def pipelines(self) -> Iterable[tuple[Step, ...]]:
        yield self.lhs
        if self.rhs is not None:
            yield self.rhs

    def residual(self, mutation: Mutation = Mutation.NONE) -> FormalLinComb:
        start = FormalLinComb(self.shape, {self.start: Scalar.one()})
        result = run_formal(self.lhs, start, mutation)
        if self.rhs is not None:
            result = result - run_formal(self.rhs, start, mutation)
        if self.scalar is not None:
            result = result - FormalLinComb(result.shape, {self.start: self.scalar})
        return result


def _domain_vectors(target: Target) -> tuple[ModuleShape, list[FormalVector]]:
    if target == "E_mu":
        return ModuleShape.verma(0, 1), [FormalVector(0, (0,)), FormalVector(0, (1,))]
    return ModuleShape.verma(1), [FormalVector(0)]


def commutation_identities(target: Target, x: Generator) -> list[Identity]:
    """X o target = target o X on each generic domain vector of target."""
    step = Step("E_mu") if target == "E_mu" else Step("F_mu")
    gen = Step("act", generator=x)
    shape, vectors = _domain_vectors(target)
    return [
        Identity(f"commute[{target},{x}]", shape, v, lhs=(step, gen), rhs=(gen, step)) for v in vectors
    ]


def lemma_identities() -> list[Identity]:
    return [
        Identity(
            "lemma:E∘F=[mu+1]Id",
            ModuleShape.verma(1),
            FormalVector(0),
            lhs=(Step("F_mu", c=0), Step("E_mu", c=0)),
            scalar=quantum_bracket(1, 0, 1),
        ),
        Identity(
            "lemma:(Id⊗ev)∘(F⊗Id)∘F=0",
            ModuleShape.verma(2),
            FormalVector(0),
            lhs=(Step("F_mu", c=1), Step("F_mu", c=0), Step("ev_pad", position=0)),
        ),
        Identity(
            "lemma:E∘(E⊗Id)∘(Id⊗coev)=0",
            ModuleShape.verma(0),
            FormalVector(0),
            lhs=(Step("coev_pad", position=0), Step("E_mu", c=0), Step("E_mu", c=1)),
        ),
    ]


def _identity_check(identities: list[Identity], mutation: Mutation) -> Callable[[], Counterexample | None]:
    def check() -> Counterexample | None:
        for identity in identities:
            residual = identity.residual(mutation)
            if residual:
                v = identity.start
                return Counterexample(level=v.d + sum(v.bits), basis=[v.d, *v.bits], residual=residual.to_json())
        return None

    return check


def commutation_claims(
    target: Target | None = None, x: Generator | None = None, *, mutation: Mutation = Mutation.NONE
) -> list[Claim]:
    targets = TARGETS if target is None else (target,)
    gens = GENERATORS if x is None else (x,)
    return [
        Claim(f"commute[{t},{g}]", 0, _identity_check(commutation_identities(t, g), mutation))
        for t in targets
        for g in gens
    ]


def lemma_claims(*, mutation: Mutation = Mutation.NONE) -> list[Claim]:
    return [Claim(i.name, 0, _identity_check([i], mutation)) for i in lemma_identities()]


def prove_commutation(
    target: Target, x: Generator, *, mutation: Mutation = Mutation.NONE
) -> VerificationReport:
    if target not in TARGETS:
        raise ValueError(f"Unknown target '{target}'; expected one of {', '.join(TARGETS)}")
    return run_claims(commutation_claims(target, x, mutation=mutation), threads=1)[0]


def prove_lemmas(*, mutation: Mutation = Mutation.NONE, threads: int | None = None) -> list[VerificationReport]:
    return run_claims(lemma_claims(mutation=mutation), threads=threads)


def prove_all(*, mutation: Mutation = Mutation.NONE, threads: int | None = None) -> list[VerificationReport]:
    """The six commutation checks followed by the three lemmas."""
    return run_claims(commutation_claims(mutation=mutation) + lemma_claims(mutation=mutation), threads=threads)


def all_identities() -> list[Identity]:
    found = [i for t in TARGETS for x in GENERATORS for i in commutation_identities(t, x)]
    return found + lemma_identities()


def agreement_claim(i0: int, *, mutation: Mutation = Mutation.NONE) -> Claim:
    """Every pipeline of every identity, run generically then at s = q^{i0}, matches the concrete run."""

    def check() -> Counterexample | None:
        for identity in all_identities():
            start = FormalLinComb(identity.shape, {identity.start: Scalar.one()})
            basis = (i0 + identity.start.d, *identity.start.bits)
            for steps in identity.pipelines():
                formal = run_formal(steps, start, mutation).instantiate(i0)
                concrete = run_concrete(steps, LinComb.basis(identity.shape, basis), mutation)
                difference = formal - concrete
                if difference:
                    logger.warning(f"{identity.name}: pipeline {' '.join(map(str, steps))} disagrees at i0={i0}")
                    return Counterexample(level=sum(basis), basis=list(basis), residual=difference.to_json())
        return None

    return Claim(f"agree[i0={i0}]", i0, check)


def check_agreement(
    indices: Iterable[int] = DEFAULT_AGREEMENT_INDICES,
    *,
    mutation: Mutation = Mutation.NONE,
    threads: int | None = None,
) -> list[VerificationReport]:
    return run_claims([agreement_claim(i0, mutation=mutation) for i0 in indices], threads=threads)
