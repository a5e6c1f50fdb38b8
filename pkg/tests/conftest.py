import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from fpplab.fpp import PassageTimeLaw  # noqa: E402
from fpplab.geometry import SimWindow  # noqa: E402
from fpplab.replicate import make_configuration  # noqa: E402

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def config_20():
    return make_configuration(SimWindow(20.0), 1.0, PassageTimeLaw.exponential(), 1, 0)


@pytest.fixture(scope="session")
def config_40():
    return make_configuration(SimWindow(40.0), 1.0, PassageTimeLaw.exponential(), 2, 0)


def random_points(n: int, seed: int, half: float = 10.0) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-half, half, size=(n, 2))


ACCEPTANCE: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def record():
    """Log one acceptance criterion outcome; printed in the terminal summary."""

    def _record(number: int, title: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE.append((number, title, bool(passed), detail))
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
