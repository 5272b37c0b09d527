"""Landscape quantities of mixed spherical spin glasses.

Submodules: ``mixture`` (mixtures and thresholds), ``complexity`` (critical
point counts), ``parisi`` (zero-temperature one-step functional and its
duality with complexity), ``goe`` (random-matrix identity and a direct
two-site oracle), ``euler`` (Hermite machinery and the mean Euler
characteristic) and ``cli``.
"""
from .errors import SpinscapeError
from .mixture import Mixture, MixtureClass, make_mixture, parse_mixture, profile

__version__ = "0.1.0"

__all__ = ["Mixture", "MixtureClass", "SpinscapeError", "make_mixture", "parse_mixture", "profile", "__version__"]
