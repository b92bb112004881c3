"""Level-blocked exact linear maps between module shapes.

Every map here is homogeneous for the weight grading: the image of level l lies
in level l + shift. A map is therefore stored as one dense matrix per level,
computed on demand and memoized. Verma shapes have infinitely many levels, so
callers always pass an explicit depth.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from qjw.errors import ShapeMismatchError
from qjw.middleware import Claim, run_claims
from qjw.models import BlockExport, Counterexample, ModuleShape, OperatorExport, VerificationReport
from qjw.repmod import GENERATORS, BasisIndex, Generator, LinComb, act_generator, enumerate_basis, level_of
from qjw.scalar import SYMBOLIC, Coefficient, Regime, coefficient_to_json

logger = logging.getLogger(__name__)

Matrix = list[list[Coefficient]]


@dataclass(frozen=True)
class Block:
    """Matrix of a map restricted to one domain level. Rows follow ``rows``, columns ``cols``."""

    level: int
    rows: tuple[BasisIndex, ...]
    cols: tuple[BasisIndex, ...]
    entries: Matrix

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def column(self, j: int) -> dict[BasisIndex, Coefficient]:
        return {self.rows[i]: row[j] for i, row in enumerate(self.entries) if row[j]}


class BlockedMap:
    def __init__(
        self,
        name: str,
        domain: ModuleShape,
        codomain: ModuleShape,
        shift: int,
        compute: Callable[[int], Matrix],
        regime: Regime = SYMBOLIC,
    ):
        self.name = name
        self.domain = domain
        self.codomain = codomain
        self.shift = shift
        self.regime = regime
        self._compute = compute
        self._blocks: dict[int, Block] = {}
        self._locks: dict[int, threading.Lock] = {}
        self._guard = threading.Lock()

    def __repr__(self) -> str:
        return f"BlockedMap({self.name}: {self.domain} -> {self.codomain}, shift={self.shift})"

    # construction

    @classmethod
    def from_action(
        cls,
        name: str,
        domain: ModuleShape,
        codomain: ModuleShape,
        shift: int,
        action: Callable[[BasisIndex], dict[BasisIndex, Coefficient]],
        regime: Regime = SYMBOLIC,
    ) -> BlockedMap:
        """Build a map from its value on each domain basis vector."""

        def compute(level: int) -> Matrix:
            rows = enumerate_basis(codomain, level + shift)
            cols = enumerate_basis(domain, level)
            row_of = {v: i for i, v in enumerate(rows)}
            entries = [[regime.zero] * len(cols) for _ in rows]
            for j, v in enumerate(cols):
                for u, coeff in action(v).items():
                    if u not in row_of:
                        raise ShapeMismatchError(f"{name}: image {u} of {v} is not a level-{level + shift} vector")
                    entries[row_of[u]][j] = coeff
            return entries

        return cls(name, domain, codomain, shift, compute, regime)

    # blocks

    def block(self, level: int) -> Block:
        cached = self._blocks.get(level)
        if cached is not None:
            return cached
        with self._guard:
            lock = self._locks.setdefault(level, threading.Lock())
        with lock:
            cached = self._blocks.get(level)
            if cached is None:
                cached = self._make_block(level)
                self._blocks[level] = cached
        return cached

    def _make_block(self, level: int) -> Block:
        rows = enumerate_basis(self.codomain, level + self.shift)
        cols = enumerate_basis(self.domain, level)
        entries = self._compute(level) if cols and rows else [[self.regime.zero] * len(cols) for _ in rows]
        if len(entries) != len(rows) or any(len(r) != len(cols) for r in entries):
            raise ShapeMismatchError(f"{self.name}: level-{level} block does not match {len(rows)}x{len(cols)}")
        logger.debug(f"Computed block {self.name} @ level {level} ({len(rows)}x{len(cols)})")
        return Block(level, rows, cols, entries)

    def column(self, v: BasisIndex) -> dict[BasisIndex, Coefficient]:
        block = self.block(level_of(v))
        try:
            j = block.cols.index(tuple(v))
        except ValueError as e:
            raise ShapeMismatchError(f"{self.name}: {v} is not a basis vector of {self.domain}") from e
        return block.column(j)

    def apply(self, comb: LinComb) -> LinComb:
        if comb.shape != self.domain:
            raise ShapeMismatchError(f"{self.name} expects vectors of {self.domain}, got {comb.shape}")
        result = LinComb(self.codomain)
        for index, coeff in comb.terms.items():
            result = result + LinComb(self.codomain, self.column(index)).scale(coeff)
        return result

    def max_level(self, depth: int) -> int:
        """Highest level <= depth at which the domain is non-empty."""
        top = self.domain.max_level
        return depth if top is None else min(depth, top)

    # algebra

    def __add__(self, other: BlockedMap) -> BlockedMap:
        return linear("add", self, other)

    def __sub__(self, other: BlockedMap) -> BlockedMap:
        return linear("sub", self, other)

    def scale(self, factor: Coefficient) -> BlockedMap:
        return linear("scale", self, factor=factor)


def _same_point(f: BlockedMap, g: BlockedMap) -> None:
    if (f.regime.q0, f.regime.mu0) != (g.regime.q0, g.regime.mu0):
        raise ShapeMismatchError(f"{f.name} and {g.name} live in different coefficient regimes")


def _matmul(a: Matrix, b: Matrix, rows: int, cols: int, zero: Coefficient) -> Matrix:
    out = [[zero] * cols for _ in range(rows)]
    for i, row in enumerate(a):
        acc = out[i]
        for k, aik in enumerate(row):
            if not aik:
                continue
            for j, bkj in enumerate(b[k]):
                if bkj:
                    acc[j] = acc[j] + aik * bkj
    return out


def identity(shape: ModuleShape, regime: Regime = SYMBOLIC) -> BlockedMap:
    return BlockedMap.from_action(f"Id[{shape}]", shape, shape, 0, lambda v: {v: regime.one}, regime)


def zero_map(domain: ModuleShape, codomain: ModuleShape, shift: int = 0, regime: Regime = SYMBOLIC) -> BlockedMap:
    return BlockedMap.from_action("0", domain, codomain, shift, lambda v: {}, regime)


@lru_cache(maxsize=None)
def generator_map(shape: ModuleShape, x: Generator, regime: Regime = SYMBOLIC) -> BlockedMap:
    """The action of K, E or F on ``shape`` as a blocked map."""
    shift = {"K": 0, "E": -1, "F": 1}[x]

    def action(v: BasisIndex) -> dict[BasisIndex, Coefficient]:
        return {u: regime.lift(c) for u, c in act_generator(shape, x, v).terms.items()}

    return BlockedMap.from_action(f"{x}[{shape}]", shape, shape, shift, action, regime)


def compose(f: BlockedMap, g: BlockedMap) -> BlockedMap:
    """f o g."""
    if f.domain != g.codomain:
        raise ShapeMismatchError(f"cannot compose {f.name}: {f.domain} -> ... after {g.name}: ... -> {g.codomain}")
    _same_point(f, g)

    def compute(level: int) -> Matrix:
        inner = g.block(level)
        outer = f.block(level + g.shift)
        rows = len(enumerate_basis(f.codomain, level + g.shift + f.shift))
        return _matmul(outer.entries, inner.entries, rows, len(inner.cols), f.regime.zero)

    return BlockedMap(f"{f.name} o {g.name}", g.domain, f.codomain, f.shift + g.shift, compute, f.regime)


def compose_all(maps: Sequence[BlockedMap]) -> BlockedMap:
    """maps[0] o maps[1] o ... o maps[-1]."""
    result = maps[-1]
    for f in reversed(maps[:-1]):
        result = compose(f, result)
    return result


def linear(
    op: str, f: BlockedMap, g: BlockedMap | None = None, *, factor: Coefficient | None = None
) -> BlockedMap:
    """Blockwise add, sub or scale."""
    if op == "scale":
        if factor is None:
            raise ValueError("scale needs a factor")

        def scaled(level: int) -> Matrix:
            return [[x * factor if x else x for x in row] for row in f.block(level).entries]

        return BlockedMap(f"({factor})*{f.name}", f.domain, f.codomain, f.shift, scaled, f.regime)

    if op not in ("add", "sub") or g is None:
        raise ValueError(f"Unknown linear operation '{op}'")
    if (f.domain, f.codomain, f.shift) != (g.domain, g.codomain, g.shift):
        raise ShapeMismatchError(f"cannot {op} {f.name} and {g.name}: shapes differ")
    _same_point(f, g)
    sign = 1 if op == "add" else -1

    def combined(level: int) -> Matrix:
        a, b = f.block(level).entries, g.block(level).entries
        return [[x + y * sign if y else x for x, y in zip(ra, rb, strict=True)] for ra, rb in zip(a, b, strict=True)]

    symbol = "+" if op == "add" else "-"
    return BlockedMap(f"({f.name} {symbol} {g.name})", f.domain, f.codomain, f.shift, combined, f.regime)


def perturbed(f: BlockedMap, level: int, row: int, col: int, delta: Coefficient) -> BlockedMap:
    """Copy of ``f`` with one entry of one block shifted by ``delta``."""

    def compute(at: int) -> Matrix:
        entries = [list(r) for r in f.block(at).entries]
        if at == level:
            entries[row][col] = entries[row][col] + delta
        return entries

    return BlockedMap(f"perturbed({f.name})", f.domain, f.codomain, f.shift, compute, f.regime)


def first_difference(f: BlockedMap, g: BlockedMap, depth: int) -> Counterexample | None:
    """First column (level order, then basis order) where f and g disagree."""
    if (f.domain, f.codomain, f.shift) != (g.domain, g.codomain, g.shift):
        raise ShapeMismatchError(f"cannot compare {f.name} and {g.name}: shapes differ")
    for level in range(f.max_level(depth) + 1):
        a, b = f.block(level), g.block(level)
        for j, v in enumerate(a.cols):
            residual = [
                [list(u), coefficient_to_json(a.entries[i][j] - b.entries[i][j])]
                for i, u in enumerate(a.rows)
                if a.entries[i][j] != b.entries[i][j]
            ]
            if residual:
                return Counterexample(level=level, basis=list(v), residual=residual)
    return None


def first_nonzero(f: BlockedMap, depth: int) -> Counterexample | None:
    return first_difference(f, zero_map(f.domain, f.codomain, f.shift, f.regime), depth)


def equal_up_to(f: BlockedMap, g: BlockedMap, depth: int) -> bool:
    return first_difference(f, g, depth) is None


def _square_block(f: BlockedMap, level: int) -> Block:
    if f.domain != f.codomain or f.shift != 0:
        raise ShapeMismatchError(f"{f.name} is not a level-preserving endomorphism")
    return f.block(level)


def block_trace(f: BlockedMap, level: int) -> Coefficient:
    block = _square_block(f, level)
    total = f.regime.zero
    for i in range(len(block.cols)):
        total = total + block.entries[i][i]
    return total


def block_rank(f: BlockedMap, level: int) -> int:
    """Rank by Gaussian elimination over the coefficient field.

    Columns are scanned left to right; the pivot is the first non-zero entry at
    or below the current row.
    """
    block = _square_block(f, level)
    m = [list(r) for r in block.entries]
    rank = 0
    for col in range(len(block.cols)):
        pivot = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        head = m[rank]
        for r in range(rank + 1, len(m)):
            if m[r][col]:
                ratio = m[r][col] / head[col]
                m[r] = [x - ratio * y if y else x for x, y in zip(m[r], head, strict=True)]
        rank += 1
    return rank


def intertwiner_claim(f: BlockedMap, depth: int) -> Claim:
    """f commutes with K, E and F on every domain vector of level <= depth."""

    def check() -> Counterexample | None:
        for x in GENERATORS:
            lhs = compose(generator_map(f.codomain, x, f.regime), f)
            rhs = compose(f, generator_map(f.domain, x, f.regime))
            found = first_difference(lhs, rhs, depth)
            if found is not None:
                return found.model_copy(update={"generator": x})
        return None

    return Claim(f"intertwiner[{f.name}]", depth, check)


def check_intertwiner(f: BlockedMap, depth: int) -> VerificationReport:
    return run_claims([intertwiner_claim(f, depth)], threads=1)[0]


def export_blocks(f: BlockedMap, depth: int, *, threads: int = 1) -> OperatorExport:
    """Blocks for levels 0..depth (capped at the domain's top level) in export form."""
    levels = list(range(f.max_level(depth) + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="qjw-block") as pool:
            blocks = list(pool.map(f.block, levels))
    else:
        blocks = [f.block(level) for level in levels]
    exported = [
        BlockExport(
            domain=f.domain,
            codomain=f.codomain,
            level=b.level,
            rows=[list(r) for r in b.rows],
            cols=[list(c) for c in b.cols],
            entries=[
                [i, j, coefficient_to_json(x)] for i, row in enumerate(b.entries) for j, x in enumerate(row) if x
            ],
        )
        for b in blocks
    ]
    return OperatorExport(operator=f.name, level_shift=f.shift, regime=f.regime.describe(), blocks=exported)
