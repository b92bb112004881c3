"""Jones-Wenzl projectors on V1^(x)n, extended projectors on M(mu) (x) V1^(x)n, and their claim suites."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from functools import lru_cache, reduce

from qjw.errors import IndexRangeError, SpecializationError
from qjw.maps import (
    BlockedMap,
    block_rank,
    block_trace,
    compose,
    compose_all,
    first_difference,
    first_nonzero,
    identity,
)
from qjw.middleware import Claim, run_claims
from qjw.models import Counterexample, ModuleShape, VerificationReport
from qjw.operators import (
    E_mu_map,
    E_tower,
    F_mu_map,
    F_tower,
    coev_i,
    coev_map,
    e_map,
    ev_i,
    ev_map,
    pad,
    tail_e_map,
)
from qjw.scalar import SYMBOLIC, Mutation, Regime, Scalar, coefficient_to_json, quantum_bracket

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def jw(n: int, regime: Regime = SYMBOLIC) -> BlockedMap:
    """P'_1 = Id, P'_n = P'_{n-1} + [n-1]/[n] P'_{n-1} e_{n-1} P'_{n-1}, with P'_{n-1} acting as P'_{n-1} (x) Id."""
    if n < 1:
        raise IndexRangeError(f"jw needs n >= 1, got {n}")
    if n == 1:
        base = identity(ModuleShape.strands(1), regime)
        base.name = "jw[1]"
        return base

    previous = pad(jw(n - 1, regime), right=1, name=f"jw[{n - 1}](x)Id")
    ratio = quantum_bracket(0, 0, n - 1) / quantum_bracket(0, 0, n)
    if regime.mutation is Mutation.JW_SIGN_FLIP:
        ratio = -ratio
    correction = compose_all([previous, e_map(n, n - 1, regime), previous]).scale(regime.lift(ratio))
    projector = previous + correction
    projector.name = f"jw[{n}]"
    return projector


def tower_normalizer(n: int) -> Scalar:
    """[mu+1][mu+2]...[mu+n]."""
    return reduce(lambda acc, k: acc * quantum_bracket(1, 0, k), range(1, n + 1), Scalar.one())


@lru_cache(maxsize=None)
def ejw(n: int, regime: Regime = SYMBOLIC) -> BlockedMap:
    """F_tower(n) o E_tower(n) / [mu+1]...[mu+n] on M(mu) (x) V1^(x)n."""
    if n < 1:
        raise IndexRangeError(f"ejw needs n >= 1, got {n}")
    unnormalized = compose(F_tower(n, regime), E_tower(n, regime))
    if regime.mutation is Mutation.DROP_EJW_NORMALIZER:
        unnormalized.name = f"ejw[{n}]"
        return unnormalized
    try:
        factor = regime.lift(tower_normalizer(n).inverse())
    except ZeroDivisionError as e:
        raise SpecializationError(f"[mu+1]...[mu+{n}] vanishes at {regime.describe()}") from e
    projector = unnormalized.scale(factor)
    projector.name = f"ejw[{n}]"
    return projector


def _idempotent(p: BlockedMap, depth: int) -> Counterexample | None:
    return first_difference(compose(p, p), p, depth)


def _rank_and_trace(p: BlockedMap, depth: int) -> Counterexample | None:
    for level in range(p.max_level(depth) + 1):
        trace, rank = block_trace(p, level), block_rank(p, level)
        if trace != 1 or rank != 1:
            return Counterexample(
                level=level, basis=[], residual=[["trace", coefficient_to_json(trace)], ["rank", rank]]
            )
    return None


def jw_claims(n: int, *, regime: Regime = SYMBOLIC) -> list[Claim]:
    p = jw(n, regime)
    depth = n
    claims = [Claim(f"jw[{n}]:P∘P=P", depth, lambda: _idempotent(p, depth))]
    for i in range(1, n):
        e = e_map(n, i, regime)
        claims.append(Claim(f"jw[{n}]:e[{i}]∘P=0", depth, lambda e=e: first_nonzero(compose(e, p), depth)))
        claims.append(Claim(f"jw[{n}]:P∘e[{i}]=0", depth, lambda e=e: first_nonzero(compose(p, e), depth)))
    return claims


def verify_jw(n: int, *, regime: Regime = SYMBOLIC, threads: int | None = None) -> list[VerificationReport]:
    """Idempotency of jw(n) and its annihilation by every e_i on both sides, on all of V1^(x)n."""
    return run_claims(jw_claims(n, regime=regime), threads=threads)


def theorem_claims(n: int, depth: int, *, regime: Regime = SYMBOLIC) -> list[Claim]:
    p = ejw(n, regime)
    prefix = f"ejw[{n}]"
    claims = [Claim(f"{prefix}:P∘P=P", depth, lambda: _idempotent(p, depth))]
    for i in range(1, n):
        ev, coev, e = ev_i(n, i, regime), coev_i(n, i, regime), tail_e_map(n, i, regime)
        claims += [
            Claim(f"{prefix}:ev[{i}]∘P=0", depth, lambda ev=ev: first_nonzero(compose(ev, p), depth)),
            Claim(
                f"{prefix}:(Id⊗e[{i}])∘P=0", depth, lambda e=e: first_nonzero(compose(e, p), depth), derived=True
            ),
            Claim(f"{prefix}:P∘coev[{i}]=0", depth, lambda coev=coev: first_nonzero(compose(p, coev), depth)),
            Claim(
                f"{prefix}:P∘(Id⊗e[{i}])=0", depth, lambda e=e: first_nonzero(compose(p, e), depth), derived=True
            ),
        ]

    def tower_identity() -> Counterexample | None:
        top = ModuleShape.verma(n)
        expected = identity(top, regime).scale(regime.lift(tower_normalizer(n)))
        return first_difference(compose(E_tower(n, regime), F_tower(n, regime)), expected, depth)

    claims += [
        Claim(f"{prefix}:E_tower∘F_tower=[mu+1]...[mu+{n}]Id", depth, tower_identity, derived=True),
        Claim(f"{prefix}:rank=1,trace=1", depth, lambda: _rank_and_trace(p, depth), derived=True),
    ]
    return claims


def verify_theorem(
    n: int, depth: int, *, regime: Regime = SYMBOLIC, threads: int | None = None
) -> list[VerificationReport]:
    """P^2 = P, ev[i] o P = 0 and P o coev[i] = 0 for the extended projector, plus derived diagnostics."""
    return run_claims(theorem_claims(n, depth, regime=regime), threads=threads)


def lemma_claims(depth: int, shifts: Iterable[int] = (0,), *, regime: Regime = SYMBOLIC) -> list[Claim]:
    claims = []
    for c in shifts:
        bracket = regime.lift(quantum_bracket(1, 0, c + 1))
        e_after_f = compose(E_mu_map(c, regime), F_mu_map(c, regime))
        expected = identity(ModuleShape.verma(c + 1), regime).scale(bracket)
        # (Id (x) ev) o (F_c (x) Id) o F_{c+1} and E_{c+1} o (E_c (x) Id) o (Id (x) coev)
        kill_ev = compose_all(
            [pad(ev_map(regime), head=c), pad(F_mu_map(c, regime), right=1), F_mu_map(c + 1, regime)]
        )
        kill_coev = compose_all(
            [E_mu_map(c + 1, regime), pad(E_mu_map(c, regime), right=1), pad(coev_map(regime), head=c)]
        )
        label = "mu" if c == 0 else f"mu+{c}"
        claims += [
            Claim(
                f"lemma[{label}]:E∘F=[mu+{c + 1}]Id",
                depth,
                lambda f=e_after_f, g=expected: first_difference(f, g, depth),
            ),
            Claim(f"lemma[{label}]:(Id⊗ev)∘(F⊗Id)∘F=0", depth, lambda f=kill_ev: first_nonzero(f, depth)),
            Claim(f"lemma[{label}]:E∘(E⊗Id)∘(Id⊗coev)=0", depth, lambda f=kill_coev: first_nonzero(f, depth)),
        ]
    return claims


def verify_lemmas(
    depth: int, shifts: Iterable[int] = (0,), *, regime: Regime = SYMBOLIC, threads: int | None = None
) -> list[VerificationReport]:
    """E o F = [mu+c+1] Id and both annihilation identities as concrete maps, one triple per shift c."""
    return run_claims(lemma_claims(depth, shifts, regime=regime), threads=threads)
