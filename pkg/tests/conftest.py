"""
Pytest configuration and shared fixtures.
"""
import json
import os
import pytest
from unittest.mock import patch

from valfield.valued_scalar import FieldDescriptor


@pytest.fixture(autouse=True)
def env_setup():
    """Set up clean environment for each test."""
    # Pin sampling settings so oracle checks are reproducible
    env_vars = {
        'VALFIELD_DEFAULT_FIELD': '{"kind": "p-adic", "p": 2}',
        'VALFIELD_SEED': '0',
        'VALFIELD_SAMPLE_VAL_MIN': '-5',
        'VALFIELD_SAMPLE_VAL_MAX': '5',
        'VALFIELD_ORACLE_RANDOM_POINTS': '16',
        'VALFIELD_MINOR_ORACLE_MAX': '4',
        'LOG_LEVEL': 'DEBUG'
    }

    with patch.dict(os.environ, env_vars, clear=True):
        yield


@pytest.fixture
def p2():
    """The 2-adic field."""
    return FieldDescriptor.padic(2)


@pytest.fixture
def p3():
    """The 3-adic field."""
    return FieldDescriptor.padic(3)


@pytest.fixture
def p5():
    """The 5-adic field."""
    return FieldDescriptor.padic(5)


@pytest.fixture
def laurent():
    """Laurent series in t."""
    return FieldDescriptor.laurent("t")


@pytest.fixture
def problem_file(tmp_path):
    """Write a problem document to a temporary JSON file and return its path."""
    def write(document, name="problem.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return write
