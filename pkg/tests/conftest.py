import numpy as np
import pytest

from darkpol import ModelSwitches, default_params, evolve_master, evolve_nonhermitian


@pytest.fixture(scope="session", autouse=True)
def _warm_numba():
    """Trigger JIT compilation once so timed tests measure physics, not compilation."""
    p = default_params()
    rho0 = np.zeros((6, 6), dtype=complex)
    rho0[2, 2] = 1.0
    evolve_master(p, rho0, 1e-3)
    evolve_master(p.with_(A_perp=0.0), rho0, 1e-3, switches=ModelSwitches(off_resonant_drives=False))
    evolve_nonhermitian(p, (1.0, 0.0, 0.0), 1e-3)


@pytest.fixture
def pure_up():
    rho = np.zeros((6, 6), dtype=complex)
    rho[2, 2] = 1.0
    return rho
