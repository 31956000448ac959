from __future__ import annotations

import pytest

from vocab_overlap.synthetic import SyntheticConfig, generate_synthetic_pair, synthetic_dumps

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion of the build")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[number] = (title, "PASS" if report.outcome == "passed" else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{status}] {number}. {title}")


@pytest.fixture(scope="session")
def small_pair():
    return generate_synthetic_pair(SyntheticConfig(vocab_size=40, docs_per_language=300, doc_length=40, seed=7))


@pytest.fixture(scope="session")
def small_dumps(small_pair):
    return synthetic_dumps(small_pair, dim=32, sigma=0.1, occurrences=12, layers=(1, 2, 3), signal_layers=(2,), seed=7)
