import numpy as np
import pytest

from bellccp import build_game, catalog, seesaw_bell

CHSH_QUANTUM = (2.0 + np.sqrt(2.0)) / 4.0
CGLMP3_MAXENT = (3.0 + 2.0 * np.sqrt(3.0)) / 9.0
CGLMP3_BEST = (1.0 + np.sqrt(11.0 / 3.0)) / 4.0


@pytest.fixture(scope="session")
def chsh():
    return catalog.chsh()


@pytest.fixture(scope="session")
def chsh_game(chsh):
    return build_game(chsh)


@pytest.fixture(scope="session")
def cglmp3():
    return catalog.cglmp(3)


@pytest.fixture(scope="session")
def cglmp3_game(cglmp3):
    return build_game(cglmp3)


@pytest.fixture(scope="session")
def chsh_seesaw(chsh):
    return seesaw_bell(chsh, 2, 2, restarts=10, tol=1e-10, seed=0)


@pytest.fixture(scope="session")
def cglmp3_seesaw(cglmp3):
    # tol 1e-9: converged to ~1e-10 of the optimum, which leaves the
    # near-optimal marginal nonuniformity detectable at the 1e-6 gate
    return seesaw_bell(cglmp3, 3, 3, restarts=10, tol=1e-9, seed=0)
