"""Random triangulations of the torus through labeled unicellular maps."""

__version__ = "0.1.0"
