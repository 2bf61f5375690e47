from pathlib import Path

import pytest

from rupturekit import model_io

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def nine_node_path() -> Path:
    return FIXTURES / "nine_node.txt"


@pytest.fixture(scope="session")
def ieee14_path() -> Path:
    return FIXTURES / "ieee14.txt"


@pytest.fixture(scope="session")
def nine_node(nine_node_path) -> model_io.InstanceFile:
    return model_io.parse_instance(nine_node_path.read_text())


@pytest.fixture(scope="session")
def ieee14(ieee14_path) -> model_io.InstanceFile:
    return model_io.parse_instance(ieee14_path.read_text())
