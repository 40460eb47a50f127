"""Exception types raised across the package."""


class WeightError(ValueError):
    """Two objects with incompatible modular weights were combined."""


class InternalInconsistency(RuntimeError):
    """A relation that must hold exactly did not; indicates a bug."""


class ObstructionViolated(ValueError):
    """A primitive does not exist because an obstruction coefficient is nonzero.

    Attributes:
        offending: list of ``(m, n, k)`` positions whose coefficient blocks a solution.
    """

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = list(offending)


class CuspCorrectionRequired(ValueError):
    """The requested double Eisenstein family needs a cusp-form correction."""


class TailTooLarge(ValueError):
    """The truncated q-expansion cannot be trusted at the requested point."""


class DegreeMismatch(ValueError):
    """Petersson pairing requested between spaces of different h-degree."""


class NonDecayingIntegrand(ValueError):
    """The Petersson integrand does not decay at the cusp."""
