"""opx: equilibrium measures, varying-weight orthogonal polynomial
asymptotics, and random-matrix kernel universality checks."""

__version__ = "0.1.0"

from .fields import ExternalField, builtin
from .equilibrium import EquilibriumMeasure, solve, solve_endpoints

__all__ = [
    "ExternalField",
    "builtin",
    "EquilibriumMeasure",
    "solve",
    "solve_endpoints",
    "__version__",
]
