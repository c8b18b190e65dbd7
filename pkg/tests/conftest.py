import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ranforge import presets, scenario


@pytest.fixture(scope="session")
def urban_spec():
    return scenario.parse_scenario(presets.calibration_yaml("urban_embb"))


@pytest.fixture(scope="session")
def rural_spec():
    return scenario.parse_scenario(presets.calibration_yaml("rural_embb"))


MINIMAL_URBAN = """
environment: urban_embb
seed: 3
sites:
- {x: 0.0, y: 0.0, sectors: 3}
users: {per_sector: 10, max_distance_m: 50.0}
"""


@pytest.fixture()
def minimal_urban_yaml():
    return MINIMAL_URBAN
