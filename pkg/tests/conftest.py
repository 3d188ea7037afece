import pytest

from maglab.model import MagParams

CONFIG_A = (0.8, 0.5, 0.2)

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def config_a():
    """Factory for config A (mu1 = 0.5, q = (0.8, 0.5, 0.2)) at a given size."""

    def build(n=2, L=1):
        return MagParams.build(n, L, 0.5, CONFIG_A)

    return build


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    status = "PASS" if rep.passed else "FAIL"
    line = f"{status}  criterion {number}: {title}" + (f" | {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
