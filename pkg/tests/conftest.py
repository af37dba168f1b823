import functools

import pytest

from fockvertex.verify import VerifyConfig, run_suite

ACCEPTANCE_LINES = {}


@functools.lru_cache(maxsize=None)
def cached_suite(name: str, cfg: VerifyConfig):
    return run_suite(name, cfg)


@pytest.fixture(scope="session")
def default_cfg():
    return VerifyConfig()


@pytest.fixture(scope="session")
def suite():
    return cached_suite


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
