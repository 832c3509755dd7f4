"""Exceptions raised when a run leaves the region where its models hold."""


class FlapsimError(Exception):
    pass


class GimbalLock(FlapsimError):
    """Pitch reached +-90 deg, where the Euler-rate map is singular."""


class SingularAllocation(FlapsimError):
    """The stacked Z-force/torque rows of the mixing matrix cannot be inverted."""


class NumericalDivergence(FlapsimError):
    """A state component blew past the divergence bound."""


class RiccatiFailure(FlapsimError):
    pass


class ScenarioError(FlapsimError):
    """Scenario file is malformed or fails validation."""


class SimulationFailure(FlapsimError):
    """A run aborted; ``result`` holds the trace recorded up to the failure."""

    def __init__(self, message, result=None, cause=None):
        super().__init__(message)
        self.result = result
        self.cause = cause
