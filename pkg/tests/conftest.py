import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)")

_results: dict[int, list] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    _results.setdefault(int(m.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(_results):
        outcomes = _results[num]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {status}")


@pytest.fixture(scope="session")
def const_mass():
    from pdmsusy.scalarfn import builtin_mass_profile
    return builtin_mass_profile("constant")


@pytest.fixture(scope="session")
def exp_mass():
    from pdmsusy.scalarfn import builtin_mass_profile
    return builtin_mass_profile("exp_scale", alpha=1.0)


@pytest.fixture(scope="session")
def cauchy_mass():
    from pdmsusy.scalarfn import builtin_mass_profile
    return builtin_mass_profile("cauchy_sq")
