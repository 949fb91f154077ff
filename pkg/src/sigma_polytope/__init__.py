"""Exact Dieudonne determinants, Newton polytopes and sigma invariants of
matrices over twisted Laurent polynomial rings."""

from .errors import (
    ArityMismatch,
    BudgetExceeded,
    CoverageGap,
    CutoffExceeded,
    CutoffTooSmall,
    DimensionMismatch,
    DivisionByZero,
    EmptyOperand,
    EmptyPolytope,
    InconsistentAtlas,
    NoInvertibilityWitness,
    NotASummandDecomposition,
    NotDeficiencyOne,
    NotPhiIdentity,
    NotSquare,
    NotUnimodular,
    ParseError,
    SigmaPolytopeError,
    SingularInput,
    SingularMatrix,
    TwistMismatch,
    UnknownGenerator,
    UnsupportedDimension,
    ZeroInput,
)
from .fields import (
    FunctionField,
    MonomialAutomorphism,
    PrimeField,
    QQ,
    RatFunc,
    RationalField,
    apply_automorphism,
    field_inverse,
)

__version__ = "0.1.0"
