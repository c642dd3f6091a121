import numpy as np
import pytest

from bingham_exchange.rng import RngState

_ACCEPTANCE = []


def record_criterion(name: str, passed: bool, detail: str) -> None:
    _ACCEPTANCE.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def rng():
    return RngState(20240611)


def uniform_sphere(n, q, seed=0):
    x = np.random.default_rng(seed).standard_normal((n, q))
    return x / np.linalg.norm(x, axis=1, keepdims=True)
