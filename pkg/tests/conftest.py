import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tiksplit import HyperplaneProjection, run_tkm, stock_instances

HYPER_A = (1.0, 0.0, 0.0, 0.0, 0.0)
HYPER_C = 1.0
P_STAR = np.array([1.0, 0.0, 0.0, 0.0, 0.0])


def seeded_x0(radius=0.9, seed=7, center=P_STAR):
    """Start on the sphere of the given radius around the limit point."""
    rng = np.random.default_rng(seed)
    u = rng.normal(size=center.shape[0])
    u /= np.linalg.norm(u)
    return center + radius * u


@pytest.fixture(scope="session")
def harmonic():
    return stock_instances()[0]


@pytest.fixture(scope="session")
def sqrt_inst():
    return stock_instances()[1]


@pytest.fixture(scope="session")
def hyperplane_T():
    return HyperplaneProjection(HYPER_A, HYPER_C)


@pytest.fixture(scope="session")
def hyperplane_run(sqrt_inst, hyperplane_T):
    """200k damped steps on the hyperplane problem; enough horizon for
    the k=0,1 step thresholds and the k=0 residual threshold."""
    return run_tkm(hyperplane_T, sqrt_inst.schedule, seeded_x0(), 200_000)
