"""
Pytest configuration file.
"""
import sys
from pathlib import Path

import pytest

# Add the repository root to the Python path so `src` imports resolve
root_path = str(Path(__file__).parent.parent)
if root_path not in sys.path:
    sys.path.insert(0, root_path)

from src.utils.config import load_config  # noqa: E402


@pytest.fixture
def toolkit_config():
    """The bundled configuration."""
    return load_config()


@pytest.fixture
def usl_csv(tmp_path):
    """Noiseless benchmark file generated from sigma=0.02, kappa=0.0001, X(1)=100."""
    lines = ["p,throughput"]
    for p in (1, 2, 4, 8, 16, 32, 64):
        capacity = p / (1 + 0.02 * (p - 1) + 0.0001 * p * (p - 1))
        lines.append(f"{p},{100 * capacity!r}")
    path = tmp_path / "usl.csv"
    path.write_text("\n".join(lines) + "\n")
    return path
