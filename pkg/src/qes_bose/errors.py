"""Exception types shared across the package."""


class QESError(Exception):
    """Base class for all package errors."""


class SectorRangeError(QESError, IndexError):
    """A basis index or hop lies outside the sector it is evaluated on."""


class InvariantSubspaceViolated(QESError):
    """The requested sector is not closed under the Hamiltonian.

    ``violations`` lists ``(n, k, alpha)`` triples for every upward coupling
    that leaves the sector with a nonzero exact coefficient.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class ComplexPairError(QESError, ValueError):
    """A 2x2 eigenproblem produced a complex-conjugate pair."""

    def __init__(self, message, pair):
        super().__init__(message)
        self.pair = pair


class ConvergenceError(QESError):
    """The dense eigensolver failed or produced residuals above tolerance."""

    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix


class TruncationError(QESError, ValueError):
    """The Fock-space cutoff is too small for the requested operation."""
