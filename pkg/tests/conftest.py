"""Configuration file for pytest.

Initialize fixtures for the small hand-checked LPs that most tests share. Each system has two rows
and five columns with b = (1, 1). The same systems are kept as instance files in `data/instances/`
for the command line tests.
"""
import importlib.util
import logging
from pathlib import Path
from typing import Any
from typing import Callable

import numpy as np
import pytest
from click.testing import CliRunner

from facet_lp.lp.data_structures import StandardFormLP


@pytest.fixture(scope="module")
def exposed_lp() -> StandardFormLP:
    """LP whose feasible set lies in the face x1 = x3 = x4 = 0, exposed by y = (1, -1)."""
    A = np.array([[1.0, 1.0, 3.0, 5.0, 2.0], [0.0, 1.0, 2.0, -2.0, 2.0]])
    return StandardFormLP(A, np.ones(2), np.ones(5))


@pytest.fixture(scope="module")
def slater_lp() -> StandardFormLP:
    """LP with the strictly feasible point (0.4, 0.1, 0.1, 0.4, 0.1)."""
    A = np.array([[1.0, 0.0, -2.0, 3.0, -4.0], [0.0, -1.0, -2.0, 3.0, 1.0]])
    return StandardFormLP(A, np.ones(2), np.ones(5))


@pytest.fixture(scope="module")
def converse_gap_lp() -> StandardFormLP:
    """Strictly feasible LP whose four basic feasible solutions are all degenerate."""
    A = np.array([[1.0, 0.0, 2.0, 0.0, -2.0], [1.0, -3.0, 2.0, 1.0, -2.0]])
    return StandardFormLP(A, np.ones(2))


@pytest.fixture
def runner() -> CliRunner:
    """Fixture for invoking command-line interfaces."""
    return CliRunner()


@pytest.fixture(scope="module")
def logger() -> logging.Logger:
    """Initialize a default logger for tests."""
    log = logging.getLogger("test-logger")
    log.setLevel(logging.CRITICAL)
    return log


@pytest.fixture
def tmpfile(tmp_path: Path) -> Path:
    """Create a file in the tmp directory."""
    return tmp_path / "tmp_output.json"


@pytest.fixture
def load_recipe() -> Callable[[str], Any]:
    """Load a recipe module for testing purposes."""

    def _load_recipe(recipe_path: str) -> Any:  # pragma: no cover
        if spec := importlib.util.spec_from_file_location("recipe", recipe_path):
            recipe = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(recipe)  # type: ignore
            return recipe

    return _load_recipe
