import pytest

from bectc.config import settings
from bectc.models import TrapShape
from bectc.services.trap import make_trap


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Keep sweeps in-process so tests can patch module functions"""
    monkeypatch.setattr(settings, "NUM_WORKERS", 1)


@pytest.fixture
def isotropic():
    return make_trap(TrapShape.ISOTROPIC)

