import os

import hypothesis
import numpy as np
import pytest

np.seterr(all="warn", under="ignore")

hypothesis.settings.register_profile("ci", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=400, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile(os.environ.get("ETATHETA_HYPOTHESIS_PROFILE", "ci"))

ACCEPTANCE_LINES: dict[int, list[str]] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    """Collects PASS/FAIL lines per acceptance criterion; printed in the summary."""
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        for line in ACCEPTANCE_LINES[k]:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_tables():
    from etatheta import fourier_extract

    return {p: fourier_extract.b_table(40, 12, prescription=p) for p in fourier_extract.PRESCRIPTIONS}
