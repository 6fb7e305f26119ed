import pytest

from gridjoin import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile every jit kernel up front so individual tests time cleanly
    _kernels.warmup()
