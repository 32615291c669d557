"""Exception hierarchy.

Validation problems (bad parameters, malformed configs) derive from
``ValidationError``; failures of the numerics themselves (gap closings,
singular systems, under-resolved traces) derive from ``NumericalError``.
The CLI maps the two families onto distinct exit codes.
"""


class TopochainError(Exception):
    pass


class ValidationError(TopochainError, ValueError):
    pass


class NonHermitianError(ValidationError):
    def __init__(self, asymmetry: float, scale: float):
        self.asymmetry = asymmetry
        self.scale = scale
        super().__init__(
            f"matrix is not Hermitian: max|M - M^H| = {asymmetry:.3e} (max|M| = {scale:.3e})"
        )


class NumericalError(TopochainError, ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    pass


class SingularMatrixError(NumericalError):
    pass


class UndampedResonanceError(SingularMatrixError):
    pass


class GaplessError(NumericalError):
    """The bulk gap closes, so the topological invariant is undefined."""


class NoEdgeStateError(NumericalError):
    pass


class EvanescentLeadError(NumericalError):
    """Probe energy lies outside the lead band, ``|E| >= J``."""


class NotInGapError(NumericalError):
    pass


class UndersampledError(NumericalError):
    pass
