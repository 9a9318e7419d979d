import math
from pathlib import Path

import pytest

from cusp_spectra.app.config.config import properties
from cusp_spectra.app.geometry import Cusp, ExplicitWeyl, FlatRectangle, Surface
from cusp_spectra.app.logger import logger, set_level
from cusp_spectra.app.modes import ModeOperator
from cusp_spectra.app.oracle import OracleConfig

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(autouse=True, scope="session")
def quiet_logs():
    set_level("WARNING")
    yield
    set_level(properties.LOG_LEVEL)


@pytest.fixture
def half_cusp() -> Cusp:
    """L=1, α²=0, ξ=1/2, b=0."""
    return Cusp(L=1.0, holonomy=math.pi)


@pytest.fixture
def single_cusp_surface(half_cusp) -> Surface:
    return Surface(cusps=[half_cusp], core=ExplicitWeyl(area=0.0))


@pytest.fixture
def rectangle_surface(half_cusp) -> Surface:
    return Surface(cusps=[half_cusp], core=FlatRectangle(width=math.pi, height=math.pi))


@pytest.fixture
def non_discrete_surface() -> Surface:
    return Surface(cusps=[Cusp(L=1.0, holonomy=2 * math.pi, b=3.0), Cusp(L=1.0, holonomy=math.pi)])


@pytest.fixture
def q_mode() -> ModeOperator:
    return ModeOperator(kind="Q", ell=0, xi=0.5, L=1.0)


@pytest.fixture
def oracle_cfg() -> OracleConfig:
    return OracleConfig(grid_points=8000)


@pytest.fixture
def thresholds_path() -> Path:
    return REPO_ROOT / "config" / "verification.yaml"


@pytest.fixture
def service_logs(caplog):
    """caplog wired to the package logger, which does not propagate."""
    logger.addHandler(caplog.handler)
    yield caplog
    logger.removeHandler(caplog.handler)
