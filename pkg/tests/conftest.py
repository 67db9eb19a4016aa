import pytest

from sorder import phase_space as ps


@pytest.fixture(scope="session")
def grid():
    """Default quadrature grid, gated on the calibration identity."""
    g = ps.QuadratureGrid()
    err = abs(ps.calibrate(g) - 1)
    if err > ps.CALIBRATION_TOL:
        pytest.fail(f"quadrature calibration gate failed: |I - 1| = {err:.3g}")
    return g
