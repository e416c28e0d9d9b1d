import pytest

from nearfield_om.config import load_config

_CRITERIA = {}


@pytest.fixture(scope="session")
def cfg():
    return load_config()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    prev = _CRITERIA.get(crit, "PASS")
    _CRITERIA[crit] = "PASS" if prev == "PASS" and report.passed else "FAIL"


def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        item.user_properties.append(("criterion", str(marker.args[0])))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_CRITERIA, key=int):
        terminalreporter.write_line(f"criterion {crit:>2}: {_CRITERIA[crit]}")
