import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sbpsat.domain import HomogeneousMedia, MediaRaster, build_regions, stack_specs  # noqa: E402

# criterion number -> (passed, detail), filled by the acceptance suite
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def smooth_raster(Lx: float, y0: float, y1: float, n: int = 17) -> MediaRaster:
    """Smoothly varying media covering ``[0, Lx] x [y0, y1]``."""
    x = np.linspace(0.0, Lx, n)
    y = np.linspace(y0, y1, n)
    X, Y = np.meshgrid(x, y)
    u, v = X / Lx, (Y - y0) / (y1 - y0)
    rho = 1.0 + 0.3 * np.sin(2 * np.pi * u) * v
    cs = 1.0 + 0.4 * v + 0.2 * np.cos(2 * np.pi * u)
    cp = 2.1 * cs + 0.3 * v
    return MediaRaster(nx=n, ny=n, dx=x[1] - x[0], dy=y[1] - y[0], x0=0.0, y0=y0,
                       rho=rho, cp=cp, cs=cs)


@pytest.fixture(scope="session")
def two_region_layout():
    """32x16 fine cells over 16x16 coarse cells on a unit-width strip."""
    return build_regions(stack_specs([(1.0, 0.5, 1 / 32), (1.0, 1.0, 1 / 16)]),
                         HomogeneousMedia(1.0, 2.0, 1.0))


@pytest.fixture(scope="session")
def hetero_layout():
    return build_regions(stack_specs([(1.0, 0.5, 1 / 32), (1.0, 1.0, 1 / 16)]),
                         smooth_raster(1.0, 0.0, 1.5))


@pytest.fixture(scope="session")
def single_layout():
    return build_regions(stack_specs([(0.5, 0.5, 1 / 16)]), HomogeneousMedia(1.0, 2.0, 1.0))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
