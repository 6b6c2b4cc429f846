import sys

import pytest

from profsite.corpus import standard_towers
from profsite.groups import build_tower


@pytest.fixture(scope="session")
def towers():
    return standard_towers()


@pytest.fixture(scope="session")
def c2():
    return build_tower({"kind": "cyclic_p", "p": 2, "depth": 3})


@pytest.fixture(scope="session")
def c3():
    return build_tower({"kind": "cyclic_p", "p": 3, "depth": 2})



def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
