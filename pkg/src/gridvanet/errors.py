"""Exception hierarchy shared across the simulator."""


class SimError(Exception):
    """Base class for all simulator errors."""


class ScenarioError(SimError):
    """Scenario file is malformed or internally inconsistent."""


class DuplicateIdError(ScenarioError):
    pass


class MissingVertexError(ScenarioError):
    pass


class NonPositiveFieldError(ScenarioError):
    pass


class BadDimensionsError(ScenarioError):
    pass


class EmptyGraphError(SimError):
    pass


class UnknownVertexError(SimError):
    pass


class BadKError(SimError):
    pass


class NoMembersError(SimError):
    pass


class NegativeWeightError(SimError):
    pass


class NonQuiescentError(SimError):
    """Message protocol failed to quiesce within its budget; protocol bug."""


class UnreachableError(SimError):
    pass


class RouteExhaustedError(SimError):
    """Vehicle ran out of route edges away from its destination; routing bug."""
