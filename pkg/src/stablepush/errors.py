"""Exception types shared across the package."""


class StablePushError(Exception):
    """Base class for all package errors."""


class SceneParseError(StablePushError):
    """Scene file is not valid JSON or has a structurally wrong layout."""


class SceneValidationError(StablePushError):
    """Scene content violates an invariant (named in the message)."""


class DegenerateConeError(StablePushError):
    """Face normals requested for a cone whose generators span rank < 3."""


class UnknownPusherError(StablePushError):
    """Referenced pusher id does not exist in the scene."""


class IterationBudgetExhausted(StablePushError):
    """Planner ran out of iterations without a qualifying plan.

    Carries best-effort diagnostics: closest approach to the goal,
    tree size and iteration count.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
