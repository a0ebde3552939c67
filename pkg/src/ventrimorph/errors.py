"""Exception types shared across the package."""


class VentrimorphError(Exception):
    """Base class for all package errors."""


class GeometryError(VentrimorphError):
    """Invalid mesh/point-cloud input or degenerate geometry."""


class VolumeError(VentrimorphError):
    """Invalid label volume, empty mask, or unsupported volume file."""


class AutodiffError(VentrimorphError):
    """Tape misuse, shape mismatch, or non-finite values in an op."""


class ConfigError(VentrimorphError):
    """Invalid run configuration (schema violation, bad value)."""


class AnalysisError(VentrimorphError):
    """Invalid cohort/statistics input."""


class OptimizationDiverged(VentrimorphError):
    """Raised when the objective stops being finite mid-optimization.

    Carries the iteration index and the last finite loss breakdown so a
    batch driver can report where a subject went off the rails.
    """

    def __init__(self, iteration, last_breakdown, message=""):
        self.iteration = iteration
        self.last_breakdown = last_breakdown
        detail = message or "objective became non-finite"
        super().__init__(f"{detail} at iteration {iteration}")
