"""Exception hierarchy shared by every edgepose sub-package."""

from __future__ import annotations


class EdgePoseError(Exception):
    """Base class for all edgepose errors."""


class InvalidModelError(EdgePoseError, ValueError):
    """A confidence model violates its construction invariants."""

    def __init__(self, message: str, *, index: int | None = None):
        super().__init__(message)
        self.index = index


class SampleFileError(EdgePoseError, ValueError):
    def __init__(self, message: str, *, line: int | None = None, index: int | None = None):
        super().__init__(message)
        self.line = line
        self.index = index


class ScenarioError(EdgePoseError, ValueError):
    """Scenario document is malformed, has unknown keys or inconsistent values."""


class ThresholdOrderError(EdgePoseError, ValueError):
    """theta_l > theta_h, or a threshold outside [0, 1]."""


class AllocationError(EdgePoseError, ValueError):
    """Transmission-time shares violate 0 <= tau_i <= 1 or sum(tau) <= 1."""


class InsufficientViewsError(EdgePoseError, ValueError):
    """Triangulation needs at least two views."""


class DegenerateGeometryError(EdgePoseError, ArithmeticError):
    """Projection onto the principal plane, point at infinity or rank-deficient DLT system."""


class InstanceTooLargeError(EdgePoseError, ValueError):
    """Exhaustive enumeration would exceed the configured combination budget."""


class InfeasibleError(EdgePoseError):
    def __init__(self, message: str, *, min_delay_s: float):
        super().__init__(message)
        self.min_delay_s = min_delay_s
