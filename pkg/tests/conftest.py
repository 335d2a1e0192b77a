import numpy as np
import pytest

from mtmb import _backend
from mtmb.domains import SimilarityParams, planted_disks_build

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def _compiled_available() -> bool:
    try:
        _backend.get_kernels("compiled")
    except ImportError:
        return False
    return True


BACKENDS = ["python"] + (["compiled"] if _compiled_available() else [])


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return _backend.get_kernels(request.param)


@pytest.fixture(params=BACKENDS)
def use_backend(request, monkeypatch):
    """Route the planted-disks domain through one specific backend."""
    from mtmb.domains import planted_disks
    monkeypatch.setattr(planted_disks, "kernels", _backend.get_kernels(request.param))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_domain():
    return planted_disks_build(5, SimilarityParams(0.15, 3), r=0.08, lam=0.2, delta=0.05,
                               h=0.1, seed=3)
