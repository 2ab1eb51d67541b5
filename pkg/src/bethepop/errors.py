"""Exception hierarchy shared by all modules."""


class BethePopError(Exception):
    """Base class for library errors."""


class InvalidType(BethePopError, ValueError):
    pass


class UnsupportedType(BethePopError):
    pass


class InvalidProblem(BethePopError, ValueError):
    pass


class NonDivisible(BethePopError, ArithmeticError):
    pass


class Undefined(BethePopError, ArithmeticError):
    pass


class ZeroStep(BethePopError, ValueError):
    pass


class Infertile(BethePopError):
    """No polynomial descendant exists in the requested direction."""


class AmbiguousSolution(BethePopError):
    """The reproduction system has a solution space of dimension > 1."""

    def __init__(self, message: str, kernel_dim: int):
        super().__init__(message)
        self.kernel_dim = kernel_dim


class PopulationOverflow(BethePopError):
    pass


class PathDependence(BethePopError):
    pass


class MissingNode(BethePopError, KeyError):
    pass


class SingularConfiguration(BethePopError, ValueError):
    pass


class RationalizationRejected(BethePopError):
    pass


class NonGeneric(BethePopError):
    pass


class ZeroVector(BethePopError):
    pass


class DescendantNotOffDiagonal(BethePopError):
    pass
