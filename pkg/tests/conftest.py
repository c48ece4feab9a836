import pytest

from skbeta import urnsim

SIMON_CONFIG = urnsim.UrnConfig(k0=1, a_shift=0.0, alpha=0.5, steps=200_000, seed=42)


@pytest.fixture(scope="session")
def simon_run():
    """The 2e5-step reference run shared by urn tests and acceptance."""
    return SIMON_CONFIG, urnsim.run(SIMON_CONFIG)
