"""Weyl, Dirac and Majorana dynamics on a time-diagonal lattice with null faces."""
from .errors import AliasingError, EnumerationCapError, InvariantViolation, NotOnLatticeError
from .geometry import Mode
from .spin import Chirality, PhaseRule, PlanarRule

__all__ = [
    "AliasingError",
    "Chirality",
    "EnumerationCapError",
    "InvariantViolation",
    "Mode",
    "NotOnLatticeError",
    "PhaseRule",
    "PlanarRule",
]
