import time
from dataclasses import replace

import pytest

from flapsim.harness.runner import run_case3, run_scenario
from flapsim.harness.scenario import Scenario, load_scenario

# filled by test_acceptance.py, printed after the run
ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str):
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


class PaperRuns:
    """Lazily simulated paper scenarios, shared across the session."""

    def __init__(self):
        self._cache = {}
        self.wall = {}
        # compile the plant kernels before anything is timed
        run_scenario(Scenario(duration=0.01))

    def get(self, name: str, controller: str = "adaptive"):
        key = (name, controller)
        if key not in self._cache:
            t0 = time.perf_counter()
            if name == "case3":
                _, res = run_case3(load_scenario("case2"))
            else:
                res = run_scenario(replace(load_scenario(name), controller=controller))
            self.wall[key] = time.perf_counter() - t0
            self._cache[key] = res
        return self._cache[key]


@pytest.fixture(scope="session")
def paper_runs():
    return PaperRuns()
