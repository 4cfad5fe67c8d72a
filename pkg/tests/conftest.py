import numpy as np
import pytest

from memflow import volterra as vt


@pytest.fixture(scope="session")
def grid5():
    return vt.TimeGrid(5.0, 1e-3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def verify_runs(tmp_path_factory):
    """Two consecutive full ``memflow verify`` runs: (exit code, report text) each."""
    from memflow.cli import main

    runs = []
    for i in range(2):
        out = tmp_path_factory.mktemp(f"verify{i}")
        code = main(["verify", "--out", str(out)])
        runs.append((code, (out / "verify.txt").read_bytes()))
    return runs


_CRITERIA_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(id, title, passed, detail)."""
    log = request.config.stash.setdefault(_CRITERIA_KEY, [])

    def record(cid, title, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {cid:<3} {title}: {detail}"
        log.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_CRITERIA_KEY, [])
    if log:
        terminalreporter.section("acceptance criteria")
        for line in log:
            terminalreporter.write_line(line)
