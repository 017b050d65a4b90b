import pytest

from septensor.eim import Direction, EimConfig, run_directional_eim
from septensor.gridfn import FunctionSource, Interval, make_uniform_grid
from septensor.lowrank import svd_decompose
from septensor.pipeline import RunConfig, decompose
from septensor.tensor import build_tensor_interpolant

_CRITERIA = []


@pytest.fixture(scope="session")
def paper_f():
    return FunctionSource.builtin("paper-f")


@pytest.fixture(scope="session")
def rank1():
    return FunctionSource.builtin("rank1-sep")


@pytest.fixture(scope="session")
def diag_grid():
    return make_uniform_grid(Interval(0.0, 1.0), 1001)


@pytest.fixture(scope="session")
def paper_bases(paper_f):
    bx = run_directional_eim(paper_f, Direction.X, EimConfig.default(paper_f, Direction.X, 10))
    by = run_directional_eim(paper_f, Direction.Y, EimConfig.default(paper_f, Direction.Y, 10))
    return bx, by


@pytest.fixture(scope="session")
def paper_T(paper_f, paper_bases):
    return build_tensor_interpolant(paper_f, *paper_bases)


@pytest.fixture(scope="session")
def paper_factors(paper_T):
    return svd_decompose(paper_T.F)


@pytest.fixture(scope="session")
def paper_run(paper_f):
    return decompose(RunConfig(paper_f, m=10, n=10, K=2))


@pytest.fixture
def criterion():
    """Record an acceptance verdict; printed in the terminal summary."""

    def record(label: str, passed: bool, detail: str = ""):
        _CRITERIA.append((label, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _CRITERIA:
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{verdict}  {label}  {detail}".rstrip())
