from .adaptive import (AdaptiveEstimates, ControlGains, attitude_adaptive_control,
                       vertical_adaptive_control)
from .cascade import ControlOutput, FlightController, Targets, velocity_to_attitude_targets
from .derivative import DerivativeEstimator
from .lqi import LQIGains, LQIWeights, lqi_control, lqi_synthesize

__all__ = [
    "AdaptiveEstimates", "ControlGains", "ControlOutput", "DerivativeEstimator",
    "FlightController", "LQIGains", "LQIWeights", "Targets", "attitude_adaptive_control",
    "lqi_control", "lqi_synthesize", "velocity_to_attitude_targets", "vertical_adaptive_control",
]
