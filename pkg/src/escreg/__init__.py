"""Extremum-seeking output regulation with a nonlinear internal model.

Simulation library for the regulation of nonlinear plants with an unknown
control direction, using a dither-based feedback and an adaptive internal model.
"""

from .errors import (ConfigError, DegenerateRow, DuplicateFrequency, EscRegError, IntegrationDiverged, NonFinite,
                     NotHurwitz, SingularMatrix)
from .scenario import build_scenario, load_config, steady_state
from .sim import integrate, ultimate_bound

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DegenerateRow", "DuplicateFrequency", "EscRegError", "IntegrationDiverged", "NonFinite",
    "NotHurwitz", "SingularMatrix", "build_scenario", "load_config", "steady_state", "integrate",
    "ultimate_bound", "__version__",
]
