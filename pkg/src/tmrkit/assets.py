"""Locate files shipped inside the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def data_path(name: str) -> Path:
    """Path of a packaged data file such as a lookup table or template."""
    return Path(str(resources.files("tmrkit").joinpath("data", name)))
