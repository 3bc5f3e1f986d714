"""
Custom exceptions for comm-tool.
"""


class CommutatorError(Exception):
    """Base class for all comm-tool exceptions."""
    pass


class ConfigError(CommutatorError):
    """Raised when there's an issue with configuration."""
    pass


# algebra

class AlgebraError(CommutatorError):
    """Base class for algebra construction and arithmetic errors."""
    pass


class InvalidSpec(AlgebraError):
    """Raised when an algebra spec is malformed or not semisimple."""
    pass


class AlgebraMismatch(AlgebraError):
    """Raised when elements of different algebras are combined."""
    pass


# numerics

class NumericsError(CommutatorError):
    """Base class for linear-algebra kernel failures."""
    pass


class NotSkewAdjoint(NumericsError):
    """Raised when an operator is not skew-adjoint in the Killing metric."""
    pass


class PairingFailure(NumericsError):
    """Raised when a nonzero-frequency eigenspace has odd dimension."""
    pass


# cartan

class CartanError(CommutatorError):
    """Base class for Cartan subalgebra and root decomposition errors."""
    pass


class CsaNotFound(CartanError):
    """Raised when no abelian centralizer was sampled within the retry budget."""
    pass


class DegenerateReference(CartanError):
    """Raised when no generic reference element was found within the retry budget."""
    pass


class NotACsa(CartanError):
    """Raised when the given subspace is not a Cartan subalgebra."""
    pass


class NotInCsa(CartanError):
    """Raised when an element expected in the CSA has a component outside it."""
    pass


# rotate

class RotationError(CommutatorError):
    """Base class for so(3) frame and Jacobi sweep errors."""
    pass


class DegenerateRoot(RotationError):
    """Raised when gamma(Y) is not positive for a root plane."""
    pass


class ZeroH(RotationError):
    """Raised when the CSA component to be rotated is below tolerance."""
    pass


class PreconditionViolated(RotationError):
    """Raised when A is not orthogonal to the CSA at sweep entry."""
    pass


class OrthogonalityDrift(RotationError):
    """Raised when A loses orthogonality to the CSA during a sweep."""
    pass


class MaxIterationsExceeded(RotationError):
    """Raised when a sweep does not converge; carries the partial trace."""

    def __init__(self, message: str, trace=None, stage: int = 0):
        super().__init__(message)
        self.trace = list(trace or [])
        self.stage = stage


# solver

class SolverError(CommutatorError):
    """Base class for commutator solving errors."""
    pass


class RegularNotFound(SolverError):
    """Raised when no regular element was found in the CSA."""
    pass


class NotRegular(SolverError):
    """Raised when an element expected to be regular is not."""
    pass


class NotInImage(SolverError):
    """Raised when a target has a CSA component and so is not in [X, g]."""
    pass


class InversionFailed(SolverError):
    """Raised when the computed preimage does not reproduce its target."""
    pass


class CertificateInvalid(SolverError):
    """Raised when a freshly computed certificate fails its residual checks."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate
