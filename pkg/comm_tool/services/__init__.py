"""Services package."""

from .cartan_service import CartanFrame, Components, Root
from .rotation_service import BiorthogonalResult, JacobiResult, JacobiStep, So3Frame
from .solver_service import CommutatorCertificate

__all__ = [
    'CartanFrame',
    'Components',
    'Root',
    'BiorthogonalResult',
    'JacobiResult',
    'JacobiStep',
    'So3Frame',
    'CommutatorCertificate',
]
