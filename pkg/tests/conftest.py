import contextlib
import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA: list[str] = []


@contextlib.contextmanager
def criterion(number: int, title: str):
    """Record a pass/fail line for one acceptance criterion."""
    detail = {}
    try:
        yield detail
    except BaseException as exc:
        text = str(exc).strip()
        msg = detail.get("info") or (text.splitlines()[0] if text else type(exc).__name__)
        _CRITERIA.append(f"criterion {number:2d} FAIL  {title}: {msg}")
        raise
    else:
        _CRITERIA.append(f"criterion {number:2d} PASS  {title}: {detail.get('info', '')}")


@pytest.fixture
def acceptance():
    return criterion


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
