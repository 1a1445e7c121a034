"""Exception types raised by the simulator."""


class SwarmIsacError(Exception):
    """Base class for all simulator errors."""


class ConfigError(SwarmIsacError, ValueError):
    """Bad configuration: unknown key, missing field or out-of-range value."""


class GeometryError(SwarmIsacError, ValueError):
    pass


class UnservableSensingDirection(SwarmIsacError):
    """The steering direction lies (numerically) inside the user-channel span."""


class UnstableRepeaterLoop(SwarmIsacError):
    """Spectral radius of the repeater feedback loop is not below one."""

    def __init__(self, radius: float):
        super().__init__(f"unstable repeater loop: spectral radius {radius:.6g} >= 1")
        self.radius = radius


class SingularSystem(SwarmIsacError):
    pass


class InfeasibleUERequirement(SwarmIsacError):
    """The power budget cannot meet the user SINR requirement."""


class NotConverged(SwarmIsacError):
    pass
