import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cplx(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if "criterion" not in item.keywords:
        return
    label = item.get_closest_marker("criterion").args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _CRITERIA[label] = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA):
        terminalreporter.write_line(f"{_CRITERIA[label]}  {label}")
