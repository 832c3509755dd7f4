"""Simulation and adaptive flight control of a four-wing tilted flapping-wing robot."""
from .allocation import (OffsetSpec, WingForceModel, WingGeometry, body_wrench,
                         build_mixing_matrix, inverse_allocation, offset_wrench)
from .errors import (GimbalLock, NumericalDivergence, RiccatiFailure, ScenarioError,
                     SimulationFailure, SingularAllocation)
from .plant import Plant, RobotParams, SimState

__version__ = "0.1.0"
