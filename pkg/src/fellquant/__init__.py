"""Finite Fell bundles, their involutive quantales of subspaces, and reconstruction checks."""
from importlib.resources import files

__version__ = "0.1.0"


def definition_path(name: str):
    """Path of a bundled definition file, e.g. ``definition_path("z2.qf")``."""
    return files(__name__) / "definitions" / name
