from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from act.config import ApiConfig
from act.pipeline import Resources


@pytest.fixture(scope="session")
def default_config() -> ApiConfig:
    return ApiConfig()


@pytest.fixture(scope="session")
def resources(default_config) -> Resources:
    return Resources.load(default_config)
