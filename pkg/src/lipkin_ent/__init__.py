"""Exact and approximate entanglement measures for the Lipkin model."""

from .lipkin import GroundState, ModelError, ModelParams, ground_state
from .measures import MeasureSet, state_measures

__all__ = ["GroundState", "MeasureSet", "ModelError", "ModelParams", "ground_state", "state_measures"]
__version__ = "0.1.0"
