"""Exception hierarchy shared by all layerwave modules."""


class LayerwaveError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LayerwaveError):
    """Input violates a documented precondition or type invariant."""


class GuardExceededError(LayerwaveError):
    """An enumeration outgrew its term guard; the instance is intractable."""


class AlgorithmError(LayerwaveError):
    """A computation failed on admissible input (e.g. non-generic data)."""
