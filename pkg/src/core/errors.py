"""Errors raised by the unexpectedness engine.

Every error is a ``ValueError`` so callers that only care about bad input can
catch that; the CLI catches ``EngineError`` and exits with status 2.
"""


class EngineError(ValueError):
    """Base class for every error the engine raises on bad input."""


class InvalidScenarioError(EngineError):
    """A scenario breaks an invariant or does not fit the requested operation."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []


class UnresolvedReferenceError(EngineError):
    """An atom or event refers to an entity, event or hypothesis that does not exist."""


class TooManyAtomsError(EngineError):
    """A scenario or interaction component is too large for exact minimisation."""


class InvalidDigitError(EngineError):
    """A digit string contains something other than 0-9 or is empty."""


class TooLongError(EngineError):
    """A target string exceeds the supported length."""


class OutOfRangeError(EngineError):
    """A numeric argument is outside its domain."""


class ResolutionExceedsAreaError(EngineError):
    """A spatial resolution cell is larger than the world area."""


class ResolutionExceedsWindowError(EngineError):
    """A temporal resolution is larger than the time window."""


class DensityTooHighError(EngineError):
    """An occurrence density puts more than one event in a resolution cell."""


class MissingHomeError(EngineError):
    """A distance-rank designation needs a person with a home location."""


class MissingObserverDataError(EngineError):
    """A third-party observer has neither a prominence rank nor ego's home to be located from."""


class UndefinedForNegativeUError(EngineError):
    """Cognitive probability is only defined for non-negative unexpectedness."""


class NotNormalizedError(EngineError):
    """A probability distribution does not sum to one."""


class ZeroProbabilityOutcomeError(EngineError):
    """The observed outcome has zero probability."""


class CopyWithoutContextError(EngineError):
    """A copying instruction ran before any digit was emitted."""


class ProgramNotFoundError(EngineError):
    """No program within the cost budget produces the target."""
