import pytest

from khtangle import dataset


@pytest.fixture(scope="session")
def tangles():
    return {name: dataset.load(name) for name in dataset.TANGLES}


@pytest.fixture(scope="session")
def trefoil(tangles):
    return tangles["trefoil"]


@pytest.fixture(scope="session")
def unknot(tangles):
    return tangles["unknot"]


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow cross-checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
