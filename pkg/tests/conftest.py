import time

import pytest

_LINES = {}


class AcceptanceRecorder:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def __init__(self, request):
        self._request = request

    def record(self, name, ok, detail, started=None):
        if started is not None:
            detail = f"{detail}; {time.perf_counter() - started:.2f}s"
        line = f"{name} {'PASS' if ok else 'FAIL'}  {detail}"
        # several tests may contribute to one criterion; any failure wins
        prev = _LINES.get(name)
        if prev is None or " PASS " in prev:
            _LINES[name] = line
        elif not ok:
            _LINES[name] = line
        with self._request.config.pluginmanager.get_plugin("capturemanager").global_and_fixture_disabled():
            print(f"\n{line}")
        return ok


@pytest.fixture
def acceptance(request):
    return AcceptanceRecorder(request)


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_LINES):
        terminalreporter.write_line(_LINES[name])
