"""Exception types shared across the toolkit.

Everything raised on purpose derives from :class:`DiracLabError` so callers can
catch toolkit failures without swallowing genuine bugs.
"""

from __future__ import annotations

__all__ = [
    "DiracLabError",
    "SizeError",
    "CapacityError",
    "SpecError",
    "ShapeError",
    "FormatError",
    "NotFound",
    "PlacementFailed",
    "TemplateMatchingFailed",
    "TargetInfeasible",
]


class DiracLabError(Exception):
    """Base class for all toolkit errors."""


class SizeError(DiracLabError, ValueError):
    """An argument violates a size or divisibility precondition."""


class CapacityError(DiracLabError):
    """The requested exact computation exceeds its enumeration budget."""


class SpecError(DiracLabError, ValueError):
    """A structured argument (contraction spec, config, record) is malformed."""


class ShapeError(DiracLabError, ValueError):
    """Parts of a composite object do not fit together as required."""


class FormatError(DiracLabError, ValueError):
    """A file or string does not conform to its declared format."""


class NotFound(DiracLabError):
    """A search finished without producing the requested object.

    ``reason`` distinguishes a completed search over the whole space
    (``"exhausted"``) from one cut short by a node budget (``"budget"``) or by a
    trial limit (``"trials"``).
    """

    def __init__(self, message: str, reason: str = "exhausted", details=None):
        super().__init__(message)
        if reason not in ("exhausted", "budget", "trials"):
            raise ValueError(f"unknown NotFound reason: {reason!r}")
        self.reason = reason
        self.details = details


class PlacementFailed(DiracLabError):
    """No absorber could be placed on a template edge."""

    def __init__(self, message: str, template_edge=None):
        super().__init__(message)
        self.template_edge = template_edge


class TemplateMatchingFailed(DiracLabError):
    """The template lost its matching property after a removal."""


class StageFailure(DiracLabError):
    """A pipeline stage failed; ``stage`` names it for the report."""

    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


class TargetInfeasible(DiracLabError):
    """The degradation target is below the graph's current minimum degree."""
