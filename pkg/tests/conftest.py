import math
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from swapengine import EngineParams  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

RECIPES = Path(__file__).resolve().parents[1] / "src" / "swapengine" / "recipes"


@pytest.fixture
def ref_params():
    """d = 4 heat engine used for the Monte Carlo checks."""
    return EngineParams(4, 1.0, 0.6, 0.5, 1.0, math.pi / 3)


@pytest.fixture(scope="session")
def random_grid():
    from oracles import random_engine_grid

    return random_engine_grid()


@pytest.fixture
def recipes_dir():
    return RECIPES


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, seconds, detail = ACCEPTANCE[n]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {title} ({seconds:.2f} s) {detail}")
