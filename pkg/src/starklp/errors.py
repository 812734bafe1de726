"""Exception hierarchy. Everything raised on purpose derives from StarkError."""


class StarkError(Exception):
    pass


class DomainError(StarkError, ValueError):
    """Non-finite or otherwise inadmissible argument."""


class ScaledFormRequired(StarkError, OverflowError):
    """The unscaled value overflows; use the scaled function w instead."""


class ConfigurationError(StarkError, ValueError):
    pass


class BoundaryValueError(StarkError, ValueError):
    """F evaluated on the real axis; use F_above / F_below."""


class PoleProximityError(StarkError, ArithmeticError):
    pass


class NoPoleError(StarkError):
    pass


class SearchError(StarkError):
    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = list(trajectory or [])


class ContourError(StarkError):
    pass


class QuadratureError(StarkError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class GridError(StarkError, ValueError):
    pass


class TrackingError(StarkError):
    pass


class DegenerateResidueError(StarkError, ArithmeticError):
    pass


class BoundStateError(StarkError):
    """A zero-width pole was passed where a resonance is required."""


class PoleOnAxisError(StarkError, ArithmeticError):
    pass


class LedgerMismatch(StarkError):
    pass
