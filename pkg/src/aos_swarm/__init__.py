"""Simulation of drone swarms that search forests with airborne optical sectioning."""

from ._accel import backend_name

__version__ = "0.1.0"
__all__ = ["backend_name", "__version__"]
