"""Exception types shared across the package."""


class ParameterDomainError(ValueError):
    """Inputs violate a physical-domain requirement (e.g. negative damping)."""


class SingularParameterError(ParameterDomainError):
    """A closed form was requested at a parameter point where it is singular."""


class RegimeError(RuntimeError):
    """An evaluator was called outside its operating regime (below vs above threshold)."""


class NotSteadyStateError(ParameterDomainError):
    """A state passed as a steady state does not satisfy the drift equations."""


class EstimationError(RuntimeError):
    """A Monte Carlo estimate could not be formed reliably."""
