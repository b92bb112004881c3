from fractions import Fraction
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from qjw.scalar import Mutation, parse_fraction


class ModuleShape(BaseModel):
    """Optional Verma head M(mu+c) followed by irreducible factors V_k."""

    model_config = ConfigDict(frozen=True)

    verma_shift: int | None = Field(None, description="Shift c of the Verma head M(mu+c); null without head")
    tail: tuple[int, ...] = Field(default=(), description="Highest weights k_j of the V_k factors, in order")

    @field_validator("tail")
    @classmethod
    def _non_negative(cls, tail: tuple[int, ...]) -> tuple[int, ...]:
        if any(k < 0 for k in tail):
            raise ValueError(f"irreducible factors need k >= 0, got {tail}")
        return tail

    @classmethod
    def verma(cls, shift: int = 0, strands: int = 0) -> "ModuleShape":
        """M(mu+shift) (x) V_1^(x)strands."""
        return cls(verma_shift=shift, tail=(1,) * strands)

    @classmethod
    def strands(cls, n: int) -> "ModuleShape":
        """V_1^(x)n; n = 0 gives the trivial module."""
        return cls(tail=(1,) * n)

    @property
    def has_head(self) -> bool:
        return self.verma_shift is not None

    @property
    def width(self) -> int:
        """Number of tensor factors, head included."""
        return len(self.tail) + self.has_head

    @property
    def max_level(self) -> int | None:
        return None if self.has_head else sum(self.tail)

    def __str__(self) -> str:
        parts = []
        if self.has_head:
            c = self.verma_shift
            parts.append("M(mu)" if c == 0 else f"M(mu{c:+d})")
        parts.extend(f"V{k}" for k in self.tail)
        return "(x)".join(parts) or "C(q)"


class Counterexample(BaseModel):
    """First failing basis vector of an identity, with its non-zero residual."""

    level: int = Field(..., description="Weight level of the failing column")
    basis: list[int] = Field(..., description="Domain basis index of the failing column")
    residual: list[list[Any]] = Field(default_factory=list, description="[codomain index, coefficient] pairs")
    generator: str | None = Field(None, description="Generator X for intertwiner checks")


class VerificationReport(BaseModel):
    """Outcome of checking one claim."""

    claim: str = Field(..., description="Claim identifier")
    status: Literal["pass", "fail"] = Field(..., description="pass or fail")
    depth: int = Field(..., description="Highest weight level checked")
    counterexample: Counterexample | None = Field(None, description="Present exactly when the claim fails")
    ms: int = Field(0, description="Wall time in milliseconds")
    derived: bool = Field(False, description="Diagnostic not stated as a claim in the source identity list")

    @model_validator(mode="after")
    def _fail_has_counterexample(self) -> "VerificationReport":
        if self.status == "fail" and self.counterexample is None:
            raise ValueError(f"failing report '{self.claim}' needs a counterexample")
        return self

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class BlockExport(BaseModel):
    """One level block of a map; entries sorted by (row, col)."""

    domain: ModuleShape
    codomain: ModuleShape
    level: int
    rows: list[list[int]]
    cols: list[list[int]]
    entries: list[list[Any]]


class OperatorExport(BaseModel):
    operator: str = Field(..., description="Stable operator identifier")
    level_shift: int = Field(0, description="Image of level l lands in level l + level_shift")
    regime: str = Field("symbolic", description="Coefficient regime of the entries")
    blocks: list[BlockExport] = Field(default_factory=list)


class RunConfig(BaseModel):
    """Validated command-line configuration."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str
    n: int = Field(3, ge=1)
    depth: int = Field(5, ge=0)
    q0: Fraction | None = None
    mu0: int | None = None
    seed: int | None = None
    out: Path | None = None
    threads: int = Field(1, ge=1)
    format: Literal["json", "pretty"] = "pretty"
    mutation: Mutation = Mutation.NONE

    @field_validator("q0", mode="before")
    @classmethod
    def _parse_q0(cls, value: Any) -> Fraction | None:
        if value is None or value == "":
            return None
        try:
            q0 = parse_fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"q0 must be a rational 'p/r', got {value!r}") from e
        if q0 in (0, 1, -1):
            raise ValueError(f"q0 must avoid 0, 1 and -1, got {value!r}")
        return q0
