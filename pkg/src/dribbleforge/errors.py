"""Exception types raised across the package.

Every error that callers are expected to handle derives from
:class:`DribbleForgeError`, so CLI and HTTP layers can map the whole family
to diagnostics in one place.
"""

from __future__ import annotations


class DribbleForgeError(Exception):
    """Base class for all domain errors."""


class TooFewPoints(DribbleForgeError):
    """Triangulation requested for fewer than three points."""


class DegenerateInput(DribbleForgeError):
    """Point set cannot be triangulated (all collinear, or duplicates)."""


class TooFewNodes(DribbleForgeError):
    """A trajectory plan needs at least three nodes."""


class DegenerateLayout(DribbleForgeError):
    """Plan node positions admit no triangulation (collinear or coincident)."""


class ParamOutOfRange(DribbleForgeError):
    """A node parameter violates the plan limits.

    Carries enough structure for node-level diagnostics in validators and
    HTTP error bodies.
    """

    def __init__(self, node_index: int, field: str, value: float,
                 low: float, high: float):
        self.node_index = node_index
        self.field = field
        self.value = value
        self.low = low
        self.high = high
        super().__init__(
            f"node {node_index}: {field}={value!r} outside [{low!r}, {high!r}]"
        )


class UnknownNode(DribbleForgeError):
    """Node index does not exist in the plan."""


class LengthMismatch(DribbleForgeError):
    """Flat parameter vector length does not match the node layout."""


class EmptyPopulation(DribbleForgeError):
    """Selection or survivor step invoked on an empty population."""


class EmptyTrace(DribbleForgeError):
    """Metrics requested for a trace with no states."""


class LayoutMismatch(DribbleForgeError):
    """Anchor plans do not share an identical node layout."""


class EmptyAnchors(DribbleForgeError):
    """A field atlas needs at least one anchor plan."""


class CoincidentGoalObstacle(DribbleForgeError):
    """Obstacle and goal coincide; the local frame orientation is undefined."""


class ValidationFailed(DribbleForgeError):
    """A document failed structural validation.

    ``details`` is a list of ``{"node": int | None, "field": str | None,
    "message": str}`` dicts, one per problem found.
    """

    def __init__(self, details: list[dict]):
        self.details = details
        summary = "; ".join(d["message"] for d in details) or "invalid document"
        super().__init__(summary)


class Busy(DribbleForgeError):
    """An optimization job is already running."""
