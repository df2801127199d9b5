"""Bipartite entanglement measures, including the reduction-induced
variation of partial von Neumann entropy (RIVPVNE)."""

from .measures import (
    MeasureError,
    MeasureResult,
    ReeConfig,
    concurrence,
    eof_search,
    eof_two_qubit,
    pvne,
    ree,
)
from .rivpvne import RivConfig, RivResult, RotationAngles, rivpvne, s_max_effective
from .states import DensityMatrix, Ensemble, PureState, bell, bell_like, from_ensemble, mixed_family, validate

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "Ensemble",
    "MeasureError",
    "MeasureResult",
    "PureState",
    "ReeConfig",
    "RivConfig",
    "RivResult",
    "RotationAngles",
    "bell",
    "bell_like",
    "concurrence",
    "eof_search",
    "eof_two_qubit",
    "from_ensemble",
    "mixed_family",
    "pvne",
    "ree",
    "rivpvne",
    "s_max_effective",
    "validate",
]
