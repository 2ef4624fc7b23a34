import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from geomreg import regression  # noqa: E402

# every energy trace produced anywhere in the suite, checked after each test
TRACES = []
_run = regression._Fitter.run


def _recording_run(self):
    _run(self)
    TRACES.append(np.array(self.trace))


regression._Fitter.run = _recording_run


def trace_is_monotone(trace, tol=1e-12):
    return bool(np.all(np.diff(trace) >= -tol))


@pytest.fixture(autouse=True)
def _ascent_invariant():
    start = len(TRACES)
    yield
    bad = [i for i, t in enumerate(TRACES[start:]) if not trace_is_monotone(t)]
    assert not bad, f"{len(bad)} fit(s) recorded a decreasing energy trace"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
