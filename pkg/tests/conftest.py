import math
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from geophase.params import EntangledInit, ProductInit, SystemParams, validate  # noqa: E402


def entangled(lambda0, theta0, gamma0=0.0, chi=0.0, cutoff=20.0, regime=None):
    return validate(SystemParams(chi=chi, gamma0=gamma0, cutoff=cutoff), EntangledInit(lambda0, theta0), regime)


def product(p, q, gamma0=0.0, chi=0.0, cutoff=20.0, regime=None):
    return validate(SystemParams(chi=chi, gamma0=gamma0, cutoff=cutoff), ProductInit(p, q), regime)


FIG_OHMIC = dict(gamma0=0.02, cutoff=20.0, chi=0.1, regime="ohmic")


@pytest.fixture
def fig_point():
    return entangled(0.2, math.pi / 5, **FIG_OHMIC)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.VERDICTS.values():
        terminalreporter.write_line(line)
