"""Command-line front end.

Exit codes: 0 every claim passed, 1 a claim failed, 2 usage error, 3 I/O error,
4 degenerate specialization point.
"""

from __future__ import annotations

import logging
import random
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any

import typer
from pydantic import ValidationError
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from qjw import __version__
from qjw.config import settings
from qjw.errors import IndexRangeError, ShapeMismatchError, SpecializationError, UnknownOperatorError
from qjw.maps import export_blocks
from qjw.middleware import configure_logging, run_claims
from qjw.models import RunConfig, VerificationReport
from qjw.operators import REGISTRY_ENTRIES, audit_operators, build_operator
from qjw.projectors import ejw, jw, verify_jw, verify_lemmas, verify_theorem
from qjw.prover import TARGETS, check_agreement, commutation_claims, prove_all
from qjw.repmod import GENERATORS
from qjw.scalar import Mutation, Regime, format_fraction
from qjw.ux import dump_json, marker, render_registry, render_reports

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4

app = typer.Typer(
    name="qjw",
    help="Exact U_q(sl2) toolkit: Jones-Wenzl and extended Jones-Wenzl projectors on Verma chains.",
    no_args_is_help=True,
    add_completion=False,
)

N = Annotated[int, typer.Option("--n", help="Number of V1 strands")]
Depth = Annotated[int, typer.Option("--depth", help="Highest weight level checked or exported")]
Threads = Annotated[int | None, typer.Option("--threads", help="Worker threads (default: QJW_THREADS or CPU count)")]
Format = Annotated[str, typer.Option("--format", help="Report format: pretty or json")]
Out = Annotated[Path | None, typer.Option("--out", help="Write output to this file instead of stdout")]
MutationOpt = Annotated[Mutation, typer.Option("--mutation", hidden=True, help="Inject a deliberate defect")]


def _fail(kind: str, message: str, code: int) -> typer.Exit:
    typer.echo(f"{marker(kind)} {message}", err=True)
    return typer.Exit(code)


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        raise _fail("usage", problems, EXIT_USAGE) from e
    except (UnknownOperatorError, IndexRangeError, ShapeMismatchError) as e:
        raise _fail("usage", str(e), EXIT_USAGE) from e
    except SpecializationError as e:
        raise _fail("degenerate", str(e), EXIT_DEGENERATE) from e
    except OSError as e:
        raise _fail("error", f"cannot write output: {e}", EXIT_IO) from e


def _config(command: str, **values: Any) -> RunConfig:
    if values.get("threads") is None:
        values["threads"] = settings.threads
    return RunConfig(command=command, **values)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        typer.echo(text, nl=False)
        return
    out.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {len(text)} bytes to {out}")


def _finish(reports: list[VerificationReport], config: RunConfig) -> None:
    _emit(render_reports(reports, config.format), config.out)
    if not all(r.passed for r in reports):
        raise typer.Exit(EXIT_FAILED)


@app.callback(invoke_without_command=True)
def _root(
    log_level: Annotated[str | None, typer.Option("--log-level", help="Override QJW_LOG_LEVEL")] = None,
    log_json: Annotated[bool, typer.Option("--log-json", help="Emit logs as JSON lines on stderr")] = False,
    version: Annotated[bool, typer.Option("--version", help="Print the version and exit")] = False,
) -> None:
    if version:
        typer.echo(__version__)
        raise typer.Exit()
    if log_level:
        settings.log_level = log_level
    if log_json:
        settings.log_json = True
    configure_logging()


@app.command()
def verify(
    n: N = settings.default_n,
    depth: Depth = settings.default_depth,
    jw_only: Annotated[bool, typer.Option("--jw", help="Check the classical projector jw(n) instead")] = False,
    lemmas: Annotated[bool, typer.Option("--lemmas", help="Check the concrete lemma maps for shifts 0..n-1")] = False,
    audit: Annotated[bool, typer.Option("--audit", help="Check every named operator is an intertwiner")] = False,
    threads: Threads = None,
    fmt: Format = "pretty",
    out: Out = None,
    mutation: MutationOpt = Mutation.NONE,
) -> None:
    """Verify projector identities exactly over Q(q, q^mu)."""
    with _exit_codes():
        config = _config("verify", n=n, depth=depth, threads=threads, format=fmt, out=out, mutation=mutation)
        if jw_only + lemmas + audit > 1:
            raise _fail("usage", "--jw, --lemmas and --audit are mutually exclusive", EXIT_USAGE)
        regime = Regime(mutation=config.mutation)
        if jw_only:
            reports = verify_jw(config.n, regime=regime, threads=config.threads)
        elif lemmas:
            reports = verify_lemmas(config.depth, range(config.n), regime=regime, threads=config.threads)
        elif audit:
            reports = audit_operators(config.n, config.depth, regime=regime, threads=config.threads)
        else:
            reports = verify_theorem(config.n, config.depth, regime=regime, threads=config.threads)
        _finish(reports, config)


def _export(config: RunConfig, build: Callable[[Regime], Any], depth: int) -> None:
    regime = Regime(mutation=config.mutation)
    exported = export_blocks(build(regime), depth, threads=config.threads)
    _emit(dump_json(exported), config.out)


@app.command("jw")
def jw_command(n: N = settings.default_n, threads: Threads = None, out: Out = None) -> None:
    """Export every level block of the Jones-Wenzl projector on V1^(x)n."""
    with _exit_codes():
        config = _config("jw", n=n, threads=threads, out=out)
        _export(config, lambda regime: jw(config.n, regime), config.n)


@app.command("ejw")
def ejw_command(
    n: N = settings.default_n, depth: Depth = settings.default_depth, threads: Threads = None, out: Out = None
) -> None:
    """Export level blocks 0..depth of the extended projector on M(mu) (x) V1^(x)n."""
    with _exit_codes():
        config = _config("ejw", n=n, depth=depth, threads=threads, out=out)
        _export(config, lambda regime: ejw(config.n, regime), config.depth)


@app.command()
def op(
    name: Annotated[str | None, typer.Argument(help="Operator id, e.g. ev, e[2], E[0], F_tower[3], coev[1]")] = None,
    list_: Annotated[bool, typer.Option("--list", help="List registered operators")] = False,
    i: Annotated[int | None, typer.Option("--i", help="Index when the name has none")] = None,
    n: N = 2,
    depth: Depth = settings.default_depth,
    threads: Threads = None,
    fmt: Format = "pretty",
    out: Out = None,
) -> None:
    """Export the level blocks of one named operator."""
    with _exit_codes():
        config = _config("op", n=n, depth=depth, threads=threads, format=fmt, out=out)
        if list_:
            _emit(render_registry(REGISTRY_ENTRIES, config.format), config.out)
            return
        if name is None:
            raise UnknownOperatorError("op needs an operator name (or --list)")
        _export(config, lambda regime: build_operator(name, n=config.n, index=i, regime=regime), config.depth)


@app.command()
def prove(
    all_: Annotated[bool, typer.Option("--all", help="All six commutations and three lemmas (default)")] = False,
    target: Annotated[str | None, typer.Option("--target", help="E_mu or F_mu")] = None,
    gen: Annotated[str | None, typer.Option("--gen", help="K, E or F")] = None,
    i: Annotated[list[int] | None, typer.Option("--i", help="Also compare with the concrete engine at index i")] = None,
    threads: Threads = None,
    fmt: Format = "pretty",
    out: Out = None,
    mutation: MutationOpt = Mutation.NONE,
) -> None:
    """Check the intertwiner and lemma computations for a symbolic Verma index."""
    with _exit_codes():
        config = _config("prove", threads=threads, format=fmt, out=out, mutation=mutation)
        if target is not None and target not in TARGETS:
            raise _fail("usage", f"unknown target '{target}'; choose from {', '.join(TARGETS)}", EXIT_USAGE)
        if gen is not None and gen not in GENERATORS:
            raise _fail("usage", f"unknown generator '{gen}'; choose from {', '.join(GENERATORS)}", EXIT_USAGE)
        if any(k < 0 for k in i or []):
            raise _fail("usage", "indices for --i must be non-negative", EXIT_USAGE)

        if target is None and gen is None:
            reports = prove_all(mutation=config.mutation, threads=config.threads)
        else:
            claims = commutation_claims(target, gen, mutation=config.mutation)
            reports = run_claims(claims, threads=config.threads)
        if i:
            reports += check_agreement(i, mutation=config.mutation, threads=config.threads)
        _finish(reports, config)


def draw_q0(rng: random.Random) -> Fraction:
    while True:
        q0 = Fraction(rng.choice((-1, 1)) * rng.randint(1, 9), rng.randint(1, 9))
        if q0 not in (0, 1, -1):
            return q0


def _specialized_reports(config: RunConfig, regime: Regime, jw_only: bool) -> list[VerificationReport]:
    logger.info(f"Specializing at {regime.describe()}")
    if jw_only:
        return verify_jw(config.n, regime=regime, threads=config.threads)
    reports = verify_theorem(config.n, config.depth, regime=regime, threads=config.threads)
    return reports + verify_lemmas(config.depth, range(config.n), regime=regime, threads=config.threads)


@app.command()
def specialize(
    q0: Annotated[str | None, typer.Option("--q0", help="Rational point for q, e.g. 3/2")] = None,
    mu0: Annotated[int | None, typer.Option("--mu0", help="Integer point for mu (>= depth + n + 1)")] = None,
    seed: Annotated[int | None, typer.Option("--seed", help="Draw q0 (and mu0) from this seed")] = None,
    n: N = settings.default_n,
    depth: Depth = settings.default_depth,
    jw_only: Annotated[bool, typer.Option("--jw", help="Check jw(n) instead of the extended projector")] = False,
    threads: Threads = None,
    fmt: Format = "pretty",
    out: Out = None,
    mutation: MutationOpt = Mutation.NONE,
) -> None:
    """Re-run the verification suites over exact rationals at (q0, mu0)."""
    with _exit_codes():
        config = _config(
            "specialize",
            q0=q0,
            mu0=mu0,
            seed=seed,
            n=n,
            depth=depth,
            threads=threads,
            format=fmt,
            out=out,
            mutation=mutation,
        )
        floor = config.depth + config.n + 1
        if config.mu0 is not None and config.mu0 < floor:
            raise _fail("usage", f"mu0 must be at least depth + n + 1 = {floor}", EXIT_USAGE)
        if config.seed is None:
            if config.q0 is None:
                raise _fail("usage", "specialize needs --q0 or --seed", EXIT_USAGE)
            point = Regime(config.q0, config.mu0 or max(floor, settings.seed_mu0_floor), config.mutation)
            _finish(_specialized_reports(config, point, jw_only), config)
            return

        rng = random.Random(config.seed)
        mu = config.mu0 or max(floor, settings.seed_mu0_floor) + rng.randint(0, 10)
        for attempt in Retrying(
            stop=stop_after_attempt(settings.max_redraws),
            retry=retry_if_exception_type(SpecializationError),
            reraise=True,
        ):
            with attempt:
                number = attempt.retry_state.attempt_number
                point = config.q0 if number == 1 and config.q0 is not None else draw_q0(rng)
                if number > 1:
                    logger.warning(f"Re-drawing q0 (attempt {number}): now {format_fraction(point)}")
                reports = _specialized_reports(config, Regime(point, mu, config.mutation), jw_only)
        _finish(reports, config)


def main():
    """Run the qjw command line."""
    app()


if __name__ == "__main__":
    main()
