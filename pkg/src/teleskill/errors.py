"""Exception types shared across the package."""


class TeleskillError(Exception):
    """Base class for all package errors."""


class InputError(TeleskillError):
    """Invalid caller-supplied data: bad streams, configs, or arguments."""


class ArchiveError(InputError):
    """Demonstration archive is missing, malformed, or inconsistent."""


class DocumentError(InputError):
    """A JSON document (skill, scene, conditions, result) failed validation."""


class FitError(TeleskillError):
    """Model fitting failed: missing stream, too few frames, degenerate data."""


class DemonstrationError(TeleskillError):
    """The scripted demonstrator did not complete the task."""


class RolloutError(TeleskillError):
    """Numerical failure while integrating a trajectory."""


class SimulationError(TeleskillError):
    """Simulator state diverged (instability guard tripped)."""
