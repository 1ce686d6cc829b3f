import pytest

from models.params import reference_params
from utils.settings import get_settings


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Settings are cached; every test starts from the environment it sets."""
    for name in ("ACCELRAD_JOBS", "ACCELRAD_LOG_LEVEL", "ACCELRAD_EPS_LADDER",
                 "ACCELRAD_MAX_HYP_TERMS", "ACCELRAD_QUAD_MAX_EVALS",
                 "ACCELRAD_EPS_EXTENSIONS"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def atom_params():
    """a = 1e15, nu = 1e4, omega = 1e5, z0 = 0.01, g = 1e7, c = 3e8."""
    return reference_params(omega=1.0e5)


@pytest.fixture
def mirror_params():
    """omega = 1e9 (alpha = 300), nu = 1e5 (beta = 0.03), psi_z = 0.0333."""
    return reference_params(omega=1.0e9, nu=1.0e5)


def groups_params(alpha, beta, phi_z=None, psi_z=None):
    """Physical parameters (a = 1e15, c = 3e8) for given dimensionless groups."""
    base = reference_params()
    scale = base.a / base.c
    omega, nu = alpha * scale, beta * scale
    if phi_z is not None:
        z0 = phi_z * base.c / nu
    else:
        z0 = psi_z * base.c / omega
    return base.replace(omega=omega, nu=nu, z0=z0)


@pytest.fixture
def make_params():
    return groups_params
