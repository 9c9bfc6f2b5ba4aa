"""Integrated information, Hilbert-space factorization and autonomy measures."""

__version__ = "0.1.0"

from ._validation import (  # noqa: E402
    ConfigError,
    InvalidStateError,
    NotSeparableError,
    NumericalError,
    PerceptroniumError,
    ShapeError,
    TachyonicModeError,
    ZeroProbabilityBranchError,
)
from .estimators import CruelestCut, HamiltonianSeparator, QuantumPhi, SnipFactorizer  # noqa: E402
from .hilbert import FactorShape  # noqa: E402

__all__ = [
    "__version__",
    "FactorShape",
    "CruelestCut",
    "QuantumPhi",
    "HamiltonianSeparator",
    "SnipFactorizer",
    "PerceptroniumError",
    "ShapeError",
    "InvalidStateError",
    "ZeroProbabilityBranchError",
    "NotSeparableError",
    "ConfigError",
    "NumericalError",
    "TachyonicModeError",
]
