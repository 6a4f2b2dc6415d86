import math

import pytest

from entqkd import (DetectorParams, TapParams, ZetaSpec, compute_xi,
                    enumerate_partitions)

N_CAP = 32

# zeta values exercised across the suite (finite general regime)
GENERAL_ZETAS = (0.1, 0.5, 1.0, 10.0, 100.0, 1000.0, 1e-8, 1e8)


@pytest.fixture(scope="session")
def parts():
    return enumerate_partitions(N_CAP)


@pytest.fixture(scope="session")
def xi_table(parts):
    specs = [ZetaSpec(z) for z in (0.0,) + GENERAL_ZETAS + (math.inf,)]
    return compute_xi(specs, N_CAP, parts)


@pytest.fixture(scope="session")
def reference_det():
    """The reference operating point used throughout: 10% detectors,
    attenuated b modes, 5e-5 dark counts."""
    return DetectorParams(eta_det=(0.1, 0.1, 0.1, 0.1),
                          eta_trans=(1.0, 1.0, 0.1, 0.1),
                          p_dark=(5e-5, 5e-5, 5e-5, 5e-5))


@pytest.fixture(scope="session")
def reference_tap():
    return TapParams(vsq=0.25)
