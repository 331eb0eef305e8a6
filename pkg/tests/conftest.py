import os
import sys

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
sys.path.insert(0, os.path.join(ROOT, "src"))

from core.config import Settings  # noqa: E402
from core.factory import ServiceFactory  # noqa: E402
from core.models import Scenario  # noqa: E402

SCENARIO_DIR = os.path.join(ROOT, "scenarios")
SWEEP_DIR = os.path.join(SCENARIO_DIR, "sweeps")


def scenario_path(name: str) -> str:
    return os.path.join(SCENARIO_DIR, f"{name}.json")


@pytest.fixture(scope="session")
def factory() -> ServiceFactory:
    return ServiceFactory(Settings())


@pytest.fixture(scope="session")
def service(factory):
    return factory.get_unexpectedness_service()


@pytest.fixture(scope="session")
def optimizer(factory):
    return factory.get_sequence_optimizer()


@pytest.fixture(scope="session")
def load():
    """Loads a bundled scenario by name."""
    def _load(name: str) -> Scenario:
        with open(scenario_path(name), "r", encoding="utf-8") as f:
            return Scenario.model_validate_json(f.read())
    return _load


def fixture_names():
    return sorted(name[:-5] for name in os.listdir(SCENARIO_DIR) if name.endswith(".json"))
