import numpy as np
import pytest

from spinhall_ising.magnetics import IntegratorConfig, Macrospin
from spinhall_ising.params import DeviceParams


@pytest.fixture(scope="session")
def reference_params():
    return DeviceParams.reference()


@pytest.fixture(scope="session")
def model():
    """Reference device with the shipped torque-scale calibration."""
    return Macrospin.from_params(DeviceParams.calibrated())


@pytest.fixture(scope="session")
def config():
    return IntegratorConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion(request):
    """Record one acceptance line; returns ``record(n, ok, detail)``."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", {})

    def record(n, ok, detail):
        lines[n] = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(lines[n])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if not lines:
        return
    terminalreporter.section("acceptance")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
