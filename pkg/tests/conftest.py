from __future__ import annotations

from pathlib import Path

import pytest

from agentcalc.scenario import load_scenario

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
ALL_FIXTURES = sorted(p.stem for p in FIXTURES.glob("*.scn"))

# criterion number -> outcome, filled in by tests marked ``acceptance(n)``
_ACCEPTANCE: dict[int, list[bool]] = {}


def load(name: str):
    return load_scenario(FIXTURES / f"{name}.scn")


@pytest.fixture
def fixture_doc():
    return load


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test backing acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE.setdefault(marker.args[0], []).append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok = all(_ACCEPTANCE[n])
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}")
