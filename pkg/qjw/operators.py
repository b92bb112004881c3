"""Named intertwiners: coev/ev, TL generators, E_mu/F_mu, their paddings and towers.

Naming: ``coev`` is C(q) -> V1 (x) V1 and ``ev`` is V1 (x) V1 -> C(q). The
loop value is ev o coev = -[2].
"""

from __future__ import annotations

import logging
import re
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

from qjw.errors import IndexRangeError, ShapeMismatchError, UnknownOperatorError
from qjw.maps import BlockedMap, compose, compose_all, first_difference, intertwiner_claim
from qjw.middleware import Claim, run_claims
from qjw.models import ModuleShape, VerificationReport
from qjw.repmod import BasisIndex
from qjw.scalar import SYMBOLIC, Coefficient, Mutation, Regime, Scalar, quantum_bracket

logger = logging.getLogger(__name__)

TRIVIAL = ModuleShape.strands(0)
PAIR = ModuleShape.strands(2)


def _check_index(n: int, i: int) -> None:
    if not 1 <= i <= n - 1:
        raise IndexRangeError(f"strand index i={i} outside 1..{n - 1} for n={n}")


@lru_cache(maxsize=None)
def coev_map(regime: Regime = SYMBOLIC) -> BlockedMap:
    """1 -> v01 - q^-1 v10."""
    image = {(0, 1): regime.one, (1, 0): regime.lift(-Scalar.monomial(q=-1))}
    return BlockedMap.from_action("coev", TRIVIAL, PAIR, 1, lambda v: dict(image), regime)


@lru_cache(maxsize=None)
def ev_map(regime: Regime = SYMBOLIC) -> BlockedMap:
    """v01 -> -q, v10 -> 1, v00 and v11 -> 0."""
    minus_q = regime.lift(-Scalar.monomial(q=1))

    def action(v: BasisIndex) -> dict[BasisIndex, Coefficient]:
        match v:
            case (0, 1):
                return {(): minus_q}
            case (1, 0):
                return {(): regime.one}
        return {}

    return BlockedMap.from_action("ev", PAIR, TRIVIAL, -1, action, regime)


def pad(
    f: BlockedMap,
    *,
    head: int | None = None,
    left: int = 0,
    right: int = 0,
    name: str | None = None,
) -> BlockedMap:
    """Id_{M(mu+head)} (x) Id^left (x) f (x) Id^right.

    A map that already carries a Verma head can only be padded on the right.
    """
    if (f.domain.has_head or f.codomain.has_head) and (head is not None or left):
        raise ShapeMismatchError(f"{f.name} already has a Verma head; only right padding applies")
    if left < 0 or right < 0:
        raise ShapeMismatchError("padding counts must be non-negative")

    def extend(shape: ModuleShape) -> ModuleShape:
        shift = head if head is not None else shape.verma_shift
        return ModuleShape(verma_shift=shift, tail=(1,) * left + shape.tail + (1,) * right)

    prefix = left + (head is not None)
    width = f.domain.width

    def action(v: BasisIndex) -> dict[BasisIndex, Coefficient]:
        before, inner, after = v[:prefix], v[prefix : prefix + width], v[prefix + width :]
        return {before + u + after: c for u, c in f.column(inner).items()}

    label = name or f"pad({f.name}, head={head}, left={left}, right={right})"
    return BlockedMap.from_action(label, extend(f.domain), extend(f.codomain), f.shift, action, f.regime)


@lru_cache(maxsize=None)
def e_map(n: int, i: int, regime: Regime = SYMBOLIC) -> BlockedMap:
    """Id^(i-1) (x) (coev o ev) (x) Id^(n-i-1) on V1^(x)n."""
    _check_index(n, i)
    loop = compose(coev_map(regime), ev_map(regime))
    return pad(loop, left=i - 1, right=n - i - 1, name=f"e[{i}]")


@lru_cache(maxsize=None)
def E_mu_map(c: int = 0, regime: Regime = SYMBOLIC) -> BlockedMap:
    """M(mu+c) (x) V1 -> M(mu+c+1): v_{i,0} -> q^i v_i, v_{i,1} -> v_{i+1}."""

    def action(v: BasisIndex) -> dict[BasisIndex, Coefficient]:
        i, bit = v
        if bit:
            return {(i + 1,): regime.one}
        return {(i,): regime.lift(Scalar.monomial(q=i))}

    return BlockedMap.from_action(
        f"E[{c}]", ModuleShape.verma(c, 1), ModuleShape.verma(c + 1), 0, action, regime
    )


@lru_cache(maxsize=None)
def F_mu_map(c: int = 0, regime: Regime = SYMBOLIC) -> BlockedMap:
    """M(mu+c+1) -> M(mu+c) (x) V1: v_i -> [mu+c+1-i] v_{i,0} + q^{i-mu-c-1} [i] v_{i-1,1}."""
    # the perturbed variant uses q^{i-mu-c}
    offset = -c if regime.mutation is Mutation.PERTURB_F_COEFFICIENT else -c - 1

    def action(v: BasisIndex) -> dict[BasisIndex, Coefficient]:
        (i,) = v
        image = {(i, 0): regime.lift(quantum_bracket(1, 0, c + 1 - i))}
        if i > 0:
            image[(i - 1, 1)] = regime.lift(Scalar.monomial(q=i + offset, t=-1) * quantum_bracket(0, 0, i))
        return image

    return BlockedMap.from_action(
        f"F[{c}]", ModuleShape.verma(c + 1), ModuleShape.verma(c, 1), 0, action, regime
    )


@lru_cache(maxsize=None)
def ev_i(n: int, i: int, regime: Regime = SYMBOLIC) -> BlockedMap:
    """ev on strands (i, i+1) of M(mu) (x) V1^(x)n."""
    _check_index(n, i)
    return pad(ev_map(regime), head=0, left=i - 1, right=n - i - 1, name=f"ev[{i}]")


@lru_cache(maxsize=None)
def coev_i(n: int, i: int, regime: Regime = SYMBOLIC) -> BlockedMap:
    """coev into strands (i, i+1) of M(mu) (x) V1^(x)n."""
    _check_index(n, i)
    return pad(coev_map(regime), head=0, left=i - 1, right=n - i - 1, name=f"coev[{i}]")


@lru_cache(maxsize=None)
def tail_e_map(n: int, i: int, regime: Regime = SYMBOLIC) -> BlockedMap:
    """Id_mu (x) e_i on M(mu) (x) V1^(x)n."""
    _check_index(n, i)
    return compose(coev_i(n, i, regime), ev_i(n, i, regime))


def _require_strands(n: int) -> None:
    if n < 1:
        raise IndexRangeError(f"towers need n >= 1, got {n}")


@lru_cache(maxsize=None)
def E_tower(n: int, regime: Regime = SYMBOLIC) -> BlockedMap:
    """M(mu) (x) V1^(x)n -> M(mu+n), absorbing one strand per step."""
    _require_strands(n)
    steps = [pad(E_mu_map(k, regime), right=n - k - 1, name=f"E[{k}](x)Id^{n - k - 1}") for k in range(n)]
    tower = compose_all(steps[::-1])
    tower.name = f"E_tower[{n}]"
    return tower


@lru_cache(maxsize=None)
def F_tower(n: int, regime: Regime = SYMBOLIC) -> BlockedMap:
    """M(mu+n) -> M(mu) (x) V1^(x)n; each step inserts its strand right after the head."""
    _require_strands(n)
    steps = [pad(F_mu_map(k, regime), right=n - k - 1, name=f"F[{k}](x)Id^{n - k - 1}") for k in range(n)]
    tower = compose_all(steps)
    tower.name = f"F_tower[{n}]"
    return tower


@dataclass(frozen=True)
class OperatorEntry:
    """A registered operator: stable identifier, source symbol and constructor."""

    ident: str
    symbol: str
    summary: str
    build: Callable[[int, int, Regime], BlockedMap]  # (index, n, regime)


REGISTRY_ENTRIES = (
    OperatorEntry("coev", "cap", "C(q) -> V1(x)V1", lambda _i, _n, r: coev_map(r)),
    OperatorEntry("ev", "cup", "V1(x)V1 -> C(q)", lambda _i, _n, r: ev_map(r)),
    OperatorEntry("e[i]", "e_i", "TL generator on V1^(x)n", lambda i, n, r: e_map(n, i, r)),
    OperatorEntry("E[c]", "E_{mu+c}", "M(mu+c)(x)V1 -> M(mu+c+1)", lambda c, _n, r: E_mu_map(c, r)),
    OperatorEntry("F[c]", "F_{mu+c}", "M(mu+c+1) -> M(mu+c)(x)V1", lambda c, _n, r: F_mu_map(c, r)),
    OperatorEntry(
        "E_tower[n]", "E_{mu+n-1}...E_{mu,n-1}", "M(mu)(x)V1^(x)n -> M(mu+n)", lambda k, _n, r: E_tower(k, r)
    ),
    OperatorEntry(
        "F_tower[n]", "F_{mu,n-1}...F_{mu+n-1}", "M(mu+n) -> M(mu)(x)V1^(x)n", lambda k, _n, r: F_tower(k, r)
    ),
    OperatorEntry(
        "ev[i]", "cap_i", "M(mu)(x)V1^(x)n -> M(mu)(x)V1^(x)(n-2)", lambda i, n, r: ev_i(n, i, r)
    ),
    OperatorEntry(
        "coev[i]", "cup_i", "M(mu)(x)V1^(x)(n-2) -> M(mu)(x)V1^(x)n", lambda i, n, r: coev_i(n, i, r)
    ),
)
REGISTRY: dict[str, OperatorEntry] = {e.ident: e for e in REGISTRY_ENTRIES}

_IDENT = re.compile(r"^(?P<base>[A-Za-z_]+)(?:\[(?P<arg>-?\d+)\])?$")


def resolve(ident: str, *, n: int = 2, index: int | None = None) -> tuple[OperatorEntry, int | None]:
    """Match ``ident`` (e.g. ``"ev"``, ``"e[2]"``, or ``"e"`` with ``index``) to a registry entry.

    Towers without an explicit argument are built for ``n`` strands.
    """
    unknown = UnknownOperatorError(f"Unknown operator '{ident}'. Use `qjw op --list` to see the registry.")
    match = _IDENT.match(ident.strip())
    if match is None:
        raise unknown
    base, arg = match["base"], match["arg"]
    if arg is not None:
        index = int(arg)
    if index is None and base in REGISTRY:
        return REGISTRY[base], None
    entry = next((e for e in REGISTRY.values() if e.ident.startswith(f"{base}[")), None)
    if entry is None:
        raise unknown
    if index is None:
        if not entry.ident.endswith("[n]"):
            raise UnknownOperatorError(f"Operator '{entry.ident}' needs an index, e.g. '{base}[1]'")
        index = n
    return entry, index


def build_operator(ident: str, *, n: int = 2, index: int | None = None, regime: Regime = SYMBOLIC) -> BlockedMap:
    entry, arg = resolve(ident, n=n, index=index)
    built = entry.build(arg if arg is not None else 0, n, regime)
    logger.debug(f"Built operator {entry.ident} (arg={arg}, n={n}) -> {built}")
    return built


def named_operators(n: int, regime: Regime = SYMBOLIC) -> list[BlockedMap]:
    """Every registered operator instantiated for chains of length n (towers at n)."""
    built = [coev_map(regime), ev_map(regime)]
    built += [e_map(n, i, regime) for i in range(1, n)]
    for c in range(n):
        built += [E_mu_map(c, regime), F_mu_map(c, regime)]
    built += [E_tower(n, regime), F_tower(n, regime)]
    built += [ev_i(n, i, regime) for i in range(1, n)]
    built += [coev_i(n, i, regime) for i in range(1, n)]
    return built


def audit_operators(
    n: int, depth: int, *, regime: Regime = SYMBOLIC, threads: int | None = None
) -> list[VerificationReport]:
    """check_intertwiner over every named operator for chains of length n."""
    return run_claims([intertwiner_claim(f, depth) for f in named_operators(n, regime)], threads=threads)


def tl_claims(n: int, *, regime: Regime = SYMBOLIC) -> list[Claim]:
    """Temperley-Lieb relations among e[1..n-1] on all of V1^(x)n, loop value -[2]."""
    depth = n
    loop = regime.lift(-quantum_bracket(0, 0, 2))
    e = {i: e_map(n, i, regime) for i in range(1, n)}

    def claim(label: str, f: BlockedMap, g: BlockedMap) -> Claim:
        return Claim(f"tl[{n}]:{label}", depth, lambda: first_difference(f, g, depth))

    claims = [claim(f"e[{i}]∘e[{i}]=-[2]e[{i}]", compose(e[i], e[i]), e[i].scale(loop)) for i in e]
    for i in range(1, n - 1):
        j = i + 1
        claims.append(claim(f"e[{i}]∘e[{j}]∘e[{i}]=e[{i}]", compose_all([e[i], e[j], e[i]]), e[i]))
        claims.append(claim(f"e[{j}]∘e[{i}]∘e[{j}]=e[{j}]", compose_all([e[j], e[i], e[j]]), e[j]))
    for i in e:
        for j in range(i + 2, n):
            claims.append(claim(f"e[{i}]∘e[{j}]=e[{j}]∘e[{i}]", compose(e[i], e[j]), compose(e[j], e[i])))
    return claims


def verify_tl(n: int, *, regime: Regime = SYMBOLIC, threads: int | None = None) -> list[VerificationReport]:
    return run_claims(tl_claims(n, regime=regime), threads=threads)
