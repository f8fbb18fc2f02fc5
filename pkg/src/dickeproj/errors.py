"""Exception hierarchy shared by all modules.

``DomainError`` covers invalid parameters (CLI exit code 2); every
``DegenerateError`` signals a mathematically empty result such as a projection
orthogonal to the state's support (CLI exit code 3).
"""


class DomainError(ValueError):
    pass


class DegenerateError(ArithmeticError):
    pass


class AnnihilationError(DegenerateError):
    pass


class NotInFamilyError(DegenerateError):
    pass


class NotRetargetableError(DegenerateError):
    pass


class EmptyPostselectionError(DegenerateError):
    pass
