"""Exception hierarchy. Everything raised on purpose derives from SdnlbError
so the CLI can turn any of them into a diagnostic plus a nonzero exit code."""


class SdnlbError(Exception):
    """Base class for all errors raised by this package."""


class TopologyError(SdnlbError):
    """Malformed, disconnected, or otherwise unusable topology input."""


class StateError(SdnlbError):
    """Invalid network state: bad mastership, unknown nodes, capacity violations."""


class ParameterError(SdnlbError):
    """Model or planner parameters outside their documented domain."""


class DetectionError(SdnlbError):
    """Load-difference matrix cannot be built (e.g. a controller load is zero)."""


class PlannerError(SdnlbError):
    """Migration planning precondition failed."""


class ScenarioError(SdnlbError):
    """Scenario file missing, unreadable, or schema-invalid."""
