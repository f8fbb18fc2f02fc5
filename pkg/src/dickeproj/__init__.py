"""Engineering SLOCC-inequivalent few-qubit states by projecting symmetric Dicke states."""

from . import entanglement, fock, symstate
from .errors import (
    AnnihilationError,
    DegenerateError,
    DomainError,
    EmptyPostselectionError,
    NotInFamilyError,
    NotRetargetableError,
)

__version__ = "0.1.0"
