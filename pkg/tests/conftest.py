"""Shared fixtures.

The blow-up and no-swirl 2D runs and the production-resolution 1D run are
expensive (tens of seconds each), so they are computed once per session and
shared by the unit tests and the acceptance module.
"""

import numpy as np
import pytest

import sectoreuler as se

# Stop once sup|g| reaches 18 (growth ~1.2e3 past the first recorded
# nonzero value, comfortably above the 1e3 growth target).  Running deeper
# under-resolves the sharpening front at these grid sizes and produces
# spurious negative spikes in the monotone quantities.
BLOWUP_STOP = 18.0


@pytest.fixture(scope="session")
def blowup_1d():
    """ε=1, n=513 run of the blow-up data to sup|g| ≈ 18."""
    grid = se.make_grid(1.0, 513)
    res = se.run_1d(grid, np.zeros(513), grid.theta ** 2,
                    stop_factor=BLOWUP_STOP)
    assert res.status == "blowup"
    return res


@pytest.fixture(scope="session")
def blowup_1d_refined():
    """Same run at n=1025 with the dt ceiling halved (for the T* shift check)."""
    grid = se.make_grid(1.0, 1025)
    res = se.run_1d(grid, np.zeros(1025), grid.theta ** 2,
                    dt_max=2.5e-3, stop_factor=BLOWUP_STOP)
    assert res.status == "blowup"
    return res


@pytest.fixture(scope="session")
def blowup_2d():
    """Coupled 2D blow-up-data run at 256x128 out to 0.95 T* of the 1D clock."""
    return se.run_axisym_blowup(nr=256, ntheta=128, t_frac=0.95,
                                record_every=5)


@pytest.fixture(scope="session")
def noswirl_2d():
    """No-swirl run at 256x128 to t = 2 (globally regular regime)."""
    return se.run_axisym_noswirl(nr=256, ntheta=128, t_end=2.0,
                                 record_every=5)


def report_at(result, t_query):
    """Recorded ShadowReport closest in time to t_query."""
    return min(result.reports, key=lambda r: abs(r.t - t_query))
