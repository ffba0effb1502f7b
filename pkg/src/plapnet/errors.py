"""Exception types shared across the package."""


class PlapnetError(Exception):
    """Base class for all library errors."""


class SchemaError(PlapnetError):
    """Malformed input document (missing keys, bad types, unknown names)."""


class ValidationError(PlapnetError):
    """A structural invariant is violated; the message names the invariant."""


class UnknownVertex(PlapnetError):
    """Vertex id or name not present in the network."""


class NotBoundaryVertex(PlapnetError):
    """Operation restricted to boundary vertices was called elsewhere."""


class DegenerateCoefficients(PlapnetError):
    """All coefficients of the boundary balance vanish; no unique root."""


class ConvergenceFailure(PlapnetError):
    """Iteration did not meet its tolerance; best candidate attached."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NotAdmissible(PlapnetError):
    """State outside the admissible class of the variational problem."""


class InvalidParams(PlapnetError):
    """Condition parameters outside their allowed ranges."""


class QuadratureFailure(PlapnetError):
    """Adaptive quadrature did not reach the requested tolerance."""


class HypothesisFailed(PlapnetError):
    """A required pointwise growth hypothesis fails on the search grid."""


class NotFound(PlapnetError):
    """A grid search was exhausted without a verified candidate.

    ``best_margin`` records the largest margin seen, for reporting.
    """

    def __init__(self, message, best_margin=None):
        super().__init__(message)
        self.best_margin = best_margin


class NonpositiveB0(PlapnetError):
    """Time bound inapplicable: the initial energy functional is <= 0."""


class OutOfRange(PlapnetError):
    """Evaluation point outside the domain of the formula."""


class ConfigError(PlapnetError):
    """Inconsistent or unusable run configuration."""


class NonFinite(PlapnetError):
    """State became non-finite; treated as a blow-up signal upstream."""
