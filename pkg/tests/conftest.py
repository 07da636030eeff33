"""Session fixtures: the two shipped scenarios and their problems."""

from __future__ import annotations

import pytest

from uavbsc.config import ScenarioConfig

from helpers import REFERENCE_CONFIG, TINY_CONFIG


@pytest.fixture(scope="session")
def reference_scenario() -> ScenarioConfig:
    return ScenarioConfig.load(REFERENCE_CONFIG)


@pytest.fixture(scope="session")
def tiny_scenario() -> ScenarioConfig:
    return ScenarioConfig.load(TINY_CONFIG)


@pytest.fixture(scope="session")
def reference_problem(reference_scenario):
    return reference_scenario.build_problem()


@pytest.fixture(scope="session")
def tiny_problem(tiny_scenario):
    return tiny_scenario.build_problem()
