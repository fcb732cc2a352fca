import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from authlab.modmath import gen_prime  # noqa: E402
from authlab.protocol import IdPolicy, ServerSecret, SystemParams, substream  # noqa: E402

P23_KEY = bytes(range(16))


@pytest.fixture(scope="session")
def p23():
    return SystemParams(23)


@pytest.fixture(scope="session")
def secret23():
    return ServerSecret(x_s=7, red_key=P23_KEY)


@pytest.fixture(scope="session")
def p64():
    return SystemParams(gen_prime(64, substream(1234, "params")))


@pytest.fixture(scope="session")
def p64_strict(p64):
    return SystemParams(p64.p, id_policy=IdPolicy.STRICT)


@pytest.fixture(scope="session")
def secret64(p64):
    return ServerSecret.generate(p64, substream(1234, "secret"))


_criteria: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion, reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.append((marker.args[0], "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, verdict in _criteria:
        terminalreporter.write_line(f"{verdict}  {label}")
