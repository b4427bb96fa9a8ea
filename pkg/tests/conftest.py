import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _strict_numpy():
    with np.errstate(over="ignore", under="ignore"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            yield


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, in criterion order."""
    lines = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            if rep.when != "call" and rep.passed:
                continue
            name = nodeid.split("::")[-1]
            num = int(name.split("_")[2])
            verdict = "PASS" if rep.passed else "FAIL"
            if lines.get(num, ("PASS",))[0] == "PASS":
                lines[num] = (verdict, name)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(lines):
        verdict, name = lines[num]
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {name}")
