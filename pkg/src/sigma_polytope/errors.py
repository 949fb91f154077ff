"""Exception types shared across the package."""


class SigmaPolytopeError(Exception):
    """Base class for all package errors."""


class DivisionByZero(SigmaPolytopeError, ZeroDivisionError):
    pass


class ArityMismatch(SigmaPolytopeError):
    pass


class TwistMismatch(SigmaPolytopeError):
    pass


class ZeroInput(SigmaPolytopeError):
    pass


class BudgetExceeded(SigmaPolytopeError):
    pass


class NotSquare(SigmaPolytopeError):
    pass


class SingularInput(SigmaPolytopeError):
    pass


class SingularMatrix(SigmaPolytopeError):
    pass


class DimensionMismatch(SigmaPolytopeError):
    pass


class UnsupportedDimension(SigmaPolytopeError):
    pass


class EmptyOperand(SigmaPolytopeError):
    pass


class EmptyPolytope(SigmaPolytopeError):
    pass


class NotASummandDecomposition(SigmaPolytopeError):
    pass


class CoverageGap(SigmaPolytopeError):
    pass


class InconsistentAtlas(SigmaPolytopeError):
    pass


class CutoffExceeded(SigmaPolytopeError):
    pass


class NotPhiIdentity(SigmaPolytopeError):
    pass


class CutoffTooSmall(SigmaPolytopeError):
    pass


class NotDeficiencyOne(SigmaPolytopeError):
    def __init__(self, message, deficiency=None):
        super().__init__(message)
        self.deficiency = deficiency


class NoInvertibilityWitness(SigmaPolytopeError):
    pass


class ParseError(SigmaPolytopeError):
    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class UnknownGenerator(ParseError):
    pass


class NotUnimodular(SigmaPolytopeError):
    pass
