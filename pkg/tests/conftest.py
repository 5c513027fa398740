import numpy as np
import pytest

from rieszcubes import DEMO_CONFIGS, build, demo_union, validate_union
from rieszcubes.kernels import KernelSet

DEMOS = list(DEMO_CONFIGS)
LOW_DIM = [n for n in DEMOS if DEMO_CONFIGS[n]["dim"] <= 2]
ONE_DIM = [n for n in DEMOS if DEMO_CONFIGS[n]["dim"] == 1]


@pytest.fixture(scope="session")
def demo_sets() -> dict[str, KernelSet]:
    return {name: build(demo_union(name), seed=0) for name in DEMOS}


@pytest.fixture(scope="session")
def two_cube():
    return validate_union(1, 1.0, [[0.0], [2.5]])


@pytest.fixture(scope="session")
def shannon() -> KernelSet:
    return shannon_set()


def shannon_set() -> KernelSet:
    """p = 1, beta = 2 pi, k_1 = 0: the integer lattice for [0, 2 pi)."""
    from rieszcubes import build_partition, make_kernel_set
    from rieszcubes.shifts import ShiftVector

    E = validate_union(1, 2 * np.pi, [[0.0]])
    P = build_partition(E)
    return make_kernel_set(E, P, ShiftVector(np.zeros((1, 1)), 1.0))
