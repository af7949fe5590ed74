import sys

import pytest
from hypothesis import settings

from syzmirror.aside import PsiFunction
from syzmirror.params import REFERENCE

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture(scope="session")
def P():
    return REFERENCE


@pytest.fixture(scope="session")
def psi_fn(P):
    return PsiFunction(P)



def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
