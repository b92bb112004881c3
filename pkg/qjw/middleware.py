import json
import logging
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import UTC, datetime
from functools import partial

from qjw.config import settings
from qjw.models import Counterexample, VerificationReport

# Configure Logger
logger = logging.getLogger("qjw")


class JsonFormatter(logging.Formatter):
    """Formatter to output one JSON object per log record."""

    def format(self, record):
        log_record = {
            "timestamp": datetime.fromtimestamp(record.created, tz=UTC).isoformat(),
            "level": record.levelname,
            "message": record.getMessage(),
            "logger": record.name,
            "path": record.pathname,
            "lineno": record.lineno,
        }
        if hasattr(record, "props"):
            log_record.update(record.props)
        if record.exc_info:
            log_record["exception"] = self.formatException(record.exc_info)
        return json.dumps(log_record, ensure_ascii=False)


def configure_logging():
    """Configure the package logger based on settings. Logs go to stderr only."""
    handler = logging.StreamHandler()

    if settings.log_json:
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"))

    # Reset handlers to avoid duplication if called multiple times
    logger.handlers = []
    logger.addHandler(handler)
    logger.setLevel(settings.log_level.upper())


@dataclass(frozen=True)
class Claim:
    """A named identity check. ``check`` returns None on success or the first counterexample."""

    id: str
    depth: int
    check: Callable[[], Counterexample | None]
    derived: bool = False


CallNext = Callable[[Claim], VerificationReport]


class Middleware:
    def on_check(self, claim: Claim, call_next: CallNext) -> VerificationReport:
        return call_next(claim)


class LoggingMiddleware(Middleware):
    def on_check(self, claim: Claim, call_next: CallNext) -> VerificationReport:
        start_time = time.time()

        # Log start (only if debug or json to avoid noise in simple mode)
        if settings.log_json or settings.log_level.upper() == "DEBUG":
            logger.info(
                f"Claim check started: {claim.id}",
                extra={"props": {"event": "claim_start", "claim": claim.id, "depth": claim.depth}},
            )

        try:
            report = call_next(claim)
            duration = time.time() - start_time
            log = logger.info if report.passed else logger.warning
            log(
                f"Claim check completed: {claim.id} [{report.status}]",
                extra={
                    "props": {
                        "event": "claim_end",
                        "claim": claim.id,
                        "status": report.status,
                        "duration_seconds": round(duration, 4),
                    }
                },
            )
            return report
        except Exception as e:
            duration = time.time() - start_time
            logger.error(
                f"Claim check failed: {claim.id}",
                extra={
                    "props": {
                        "event": "claim_error",
                        "claim": claim.id,
                        "duration_seconds": round(duration, 4),
                        "error": str(e),
                    }
                },
                exc_info=True,
            )
            raise


def _execute(claim: Claim) -> VerificationReport:
    started = time.perf_counter()
    counterexample = claim.check()
    return VerificationReport(
        claim=claim.id,
        status="pass" if counterexample is None else "fail",
        depth=claim.depth,
        counterexample=counterexample,
        ms=int((time.perf_counter() - started) * 1000),
        derived=claim.derived,
    )


def _chain(middleware: Sequence[Middleware]) -> CallNext:
    # First entry is outermost
    call_next: CallNext = _execute
    for layer in reversed(middleware):
        call_next = partial(layer.on_check, call_next=call_next)
    return call_next


def run_claims(
    claims: Iterable[Claim],
    *,
    threads: int | None = None,
    middleware: Sequence[Middleware] | None = None,
) -> list[VerificationReport]:
    """Check claims, possibly concurrently; reports come back in claim order."""
    claims = list(claims)
    handler = _chain([LoggingMiddleware()] if middleware is None else middleware)
    workers = max(1, min(threads or settings.threads, len(claims) or 1))
    if workers == 1:
        return [handler(claim) for claim in claims]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="qjw-claim") as pool:
        return list(pool.map(handler, claims))
