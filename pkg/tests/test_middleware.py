import json
import logging
import threading

import pytest

from qjw.config import settings
from qjw.middleware import Claim, JsonFormatter, LoggingMiddleware, Middleware, run_claims
from qjw.models import Counterexample


def passing(claim_id="sample", depth=2):
    return Claim(claim_id, depth, lambda: None)


def failing(claim_id="broken"):
    return Claim(claim_id, 1, lambda: Counterexample(level=1, basis=[0, 1], residual=[[[0], "1"]]))


@pytest.fixture
def json_logs(monkeypatch):
    monkeypatch.setattr(settings, "log_json", True)
    monkeypatch.setattr(settings, "log_level", "INFO")


def test_logging_middleware(caplog, json_logs):
    with caplog.at_level(logging.INFO, logger="qjw"):
        reports = run_claims([passing()], threads=1)

    assert reports[0].passed
    assert "Claim check started: sample" in caplog.text
    assert "Claim check completed: sample [pass]" in caplog.text
    end = [r for r in caplog.records if r.props["event"] == "claim_end"][0]
    assert end.props["claim"] == "sample"
    assert end.props["status"] == "pass"


def test_failed_claim_logs_a_warning(caplog):
    with caplog.at_level(logging.INFO, logger="qjw"):
        reports = run_claims([failing()], threads=1)

    assert reports[0].status == "fail"
    assert reports[0].counterexample.level == 1
    warnings = [r for r in caplog.records if r.levelno == logging.WARNING]
    assert warnings[0].getMessage() == "Claim check completed: broken [fail]"


def test_start_message_is_quiet_by_default(caplog, monkeypatch):
    monkeypatch.setattr(settings, "log_json", False)
    monkeypatch.setattr(settings, "log_level", "WARNING")
    with caplog.at_level(logging.INFO, logger="qjw"):
        run_claims([passing()], threads=1)
    assert "Claim check started" not in caplog.text


def test_exceptions_are_logged_and_reraised(caplog):
    def explode():
        raise ZeroDivisionError("division by zero")

    with caplog.at_level(logging.INFO, logger="qjw"), pytest.raises(ZeroDivisionError):
        run_claims([Claim("boom", 0, explode)], threads=1)
    assert "Claim check failed: boom" in caplog.text


def test_reports_keep_claim_order_under_threads():
    barrier = threading.Barrier(2, timeout=5)

    def slow():
        barrier.wait()
        return None

    claims = [Claim("a", 0, slow), Claim("b", 0, slow), passing("c"), passing("d")]
    reports = run_claims(claims, threads=2, middleware=[])
    assert [r.claim for r in reports] == ["a", "b", "c", "d"]
    assert all(r.passed for r in reports)


def test_middleware_chain_order():
    seen = []

    class Recorder(Middleware):
        def __init__(self, name):
            self.name = name

        def on_check(self, claim, call_next):
            seen.append(f"{self.name}:in")
            report = call_next(claim)
            seen.append(f"{self.name}:out")
            return report

    run_claims([passing()], threads=1, middleware=[Recorder("outer"), Recorder("inner")])
    assert seen == ["outer:in", "inner:in", "inner:out", "outer:out"]


def test_derived_flag_is_carried():
    report = run_claims([Claim("d", 3, lambda: None, derived=True)], threads=1, middleware=[])[0]
    assert report.derived
    assert report.depth == 3


def test_json_formatter_merges_props():
    record = logging.LogRecord("qjw", logging.INFO, __file__, 1, "hello", None, None)
    record.props = {"event": "claim_end", "claim": "x"}
    payload = json.loads(JsonFormatter().format(record))
    assert payload["message"] == "hello"
    assert payload["level"] == "INFO"
    assert payload["event"] == "claim_end"
